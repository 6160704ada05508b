//! Command-line front end. `run` does all the work and returns the exit code
//! with the text to print, so tests can drive it without a subprocess.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
//! parse and parameter-guard errors.

use crate::cuspmaps::{verify_bigger_range, verify_cuspidal, verify_cuspidal_twisted, verify_higher_m, verify_r1};
use crate::dualnum::verify_image;
use crate::error::{Error, Result};
use crate::gf::Tower;
use crate::grp::GroupElem;
use crate::lemmas::verify_lemmas;
use crate::poly::{profile_dim, MultiPoly};
use crate::psmaps::{
    verify_d_periodicity, verify_periodicity, verify_ps, verify_split, verify_split_case, verify_successive_quotients,
    PsConfig,
};
use crate::report::Report;
use crate::theta::{ideal_component, Rewriter};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::collections::BTreeMap;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser, Debug)]
#[command(name = "modrep", version, about = "Exact checks of explicit isomorphisms for GL2 over finite fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run one verification suite and print its report.
    Verify {
        #[arg(value_enum)]
        which: Which,
        #[command(flatten)]
        opts: Opts,
    },
    /// Reduce a polynomial modulo ⟨θ_0, …, θ_{f−1}⟩ with rewrite certificates.
    Reduce(Opts),
    /// Apply a matrix to a polynomial.
    Act(Opts),
    /// Quotient dimensions for a degree profile and θ-exponents.
    Dims(Opts),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Which {
    Ps,
    PsTwisted,
    Split,
    Periodicity,
    Cuspidal,
    CuspidalTwisted,
    BiggerRange,
    HigherM,
    DualImage,
    Lemmas,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    f: Option<usize>,
    /// Comma-separated degrees; a single entry may be negative for bigger-range.
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Comma-separated θ-exponents minus one.
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    json: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Polynomial text; read from stdin when absent.
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Matrix "[[a,b],[c,d]]".
    #[arg(long)]
    g: Option<String>,
}

impl Opts {
    fn need_p(&self) -> Result<u64> {
        self.p.ok_or_else(|| usage("--p is required"))
    }

    fn ints(s: &Option<String>, flag: &str) -> Result<Option<Vec<i64>>> {
        let Some(s) = s else { return Ok(None) };
        s.split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("--{flag}: {x:?} is not an integer"))))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn list(s: &Option<String>, flag: &str) -> Result<Option<Vec<usize>>> {
        match Self::ints(s, flag)? {
            None => Ok(None),
            Some(v) => v
                .into_iter()
                .map(|x| usize::try_from(x).map_err(|_| Error::Parse(format!("--{flag}: {x} is negative"))))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn need_r(&self) -> Result<Vec<usize>> {
        Self::list(&self.r, "r")?.ok_or_else(|| usage("--r is required"))
    }

    fn need_m(&self) -> Result<Vec<usize>> {
        Self::list(&self.m, "m")?.ok_or_else(|| usage("--m is required"))
    }

    fn single(v: Vec<usize>, flag: &str) -> Result<usize> {
        match v.as_slice() {
            [x] => Ok(*x),
            _ => Err(usage(&format!("--{flag} takes a single value here"))),
        }
    }

    fn r1(&self) -> Result<usize> {
        Self::single(self.need_r()?, "r")
    }

    fn m1(&self) -> Result<usize> {
        Self::single(self.need_m()?, "m")
    }

    fn r_signed(&self) -> Result<i64> {
        match Self::ints(&self.r, "r")?.as_deref() {
            Some([x]) => Ok(*x),
            Some(_) => Err(usage("--r takes a single value here")),
            None => Err(usage("--r is required")),
        }
    }

    /// f from --f or the length of --r, and they must agree.
    fn slots(&self, r: &[usize]) -> Result<usize> {
        match self.f {
            Some(f) if f != r.len() => Err(usage(&format!("--f {f} but --r has {} entries", r.len()))),
            _ => Ok(r.len()),
        }
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

fn usage(msg: &str) -> Error {
    Error::Parse(msg.to_string())
}

/// Guidance appended to guard errors.
fn hint(e: &Error) -> String {
    match e {
        Error::TooLarge { .. } => "hint: raise MODREP_MAX_Q to enumerate larger groups".into(),
        Error::NotDivisible { .. } => "hint: the split map needs p | r".into(),
        _ => String::new(),
    }
}

/// Parse `args` (including the program name) and execute.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    let jobs = match &cli.cmd {
        Cmd::Verify { opts, .. } | Cmd::Reduce(opts) | Cmd::Act(opts) | Cmd::Dims(opts) => opts.jobs,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => return (2, format!("error: cannot start {jobs:?} workers: {e}\n")),
    };
    match pool.install(|| dispatch(&cli.cmd)) {
        Ok(out) => out,
        Err(e) => {
            let h = hint(&e);
            let mut msg = format!("error: {e}\n");
            if !h.is_empty() {
                msg.push_str(&h);
                msg.push('\n');
            }
            (2, msg)
        }
    }
}

fn dispatch(cmd: &Cmd) -> Result<(i32, String)> {
    match cmd {
        Cmd::Verify { which, opts } => {
            let rep = verify(*which, opts)?;
            let code = if rep.pass() { 0 } else { 1 };
            let text = if opts.json { rep.to_json_pretty() + "\n" } else { rep.render() };
            Ok((code, text))
        }
        Cmd::Reduce(opts) => reduce(opts),
        Cmd::Act(opts) => act(opts),
        Cmd::Dims(opts) => dims(opts),
    }
}

fn verify(which: Which, o: &Opts) -> Result<Report> {
    let p = if which == Which::Lemmas { 0 } else { o.need_p()? };
    match which {
        Which::Ps => {
            let r = o.need_r()?;
            if r.len() != 1 {
                return Err(usage("ps takes one degree; use ps-twisted for f > 1"));
            }
            verify_ps(&PsConfig::new(p, &r, &o.need_m()?))
        }
        Which::PsTwisted => {
            let r = o.need_r()?;
            o.slots(&r)?;
            verify_ps(&PsConfig::new(p, &r, &o.need_m()?))
        }
        Which::Split => {
            let r = o.r1()?;
            match o.m.as_ref() {
                Some(_) => verify_split(p, r, o.m1()?, o.i.unwrap_or(0)),
                None => verify_split_case(p, r),
            }
        }
        Which::Periodicity => match o.s {
            Some(s) => verify_periodicity(p, o.m1()?, o.r1()?, s, o.seed()),
            None => verify_d_periodicity(p, o.r1()?, o.m1()?),
        },
        Which::Cuspidal => {
            let r = o.r1()?;
            let mut rep = verify_cuspidal(p, r)?;
            if r == 1 {
                rep.absorb("r1_map", verify_r1(p)?);
            }
            Ok(rep)
        }
        Which::CuspidalTwisted => {
            let f = o.f.ok_or_else(|| usage("--f is required"))?;
            verify_cuspidal_twisted(p, f, o.r1()?)
        }
        Which::BiggerRange => verify_bigger_range(p, o.r_signed()?, o.k.unwrap_or(0)),
        Which::HigherM => verify_higher_m(p, o.r_signed()?, o.m1()?),
        Which::DualImage => verify_image(p, o.m1()?, o.r1()?),
        Which::Lemmas => verify_lemmas(o.seed()),
    }
}

fn read_poly(o: &Opts) -> Result<String> {
    match &o.poly {
        Some(s) => Ok(s.clone()),
        None => {
            let mut s = String::new();
            std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
                .map_err(|e| Error::Parse(format!("reading stdin: {e}")))?;
            Ok(s.trim().to_string())
        }
    }
}

fn parse_poly(t: &Tower, o: &Opts, f: usize) -> Result<MultiPoly> {
    let text = read_poly(o)?;
    match Opts::list(&o.r, "r")? {
        Some(r) => {
            o.slots(&r)?;
            MultiPoly::parse_with_profile(t, &text, &r)
        }
        None => MultiPoly::parse(t, &text, f),
    }
}

fn act(o: &Opts) -> Result<(i32, String)> {
    let f = o.f.unwrap_or(1);
    let t = Tower::new(o.need_p()?, f)?;
    let g = GroupElem::parse(&t, o.g.as_deref().ok_or_else(|| usage("--g is required"))?)?;
    let poly = parse_poly(&t, o, f)?;
    let out = poly.substitute_linear(&t, &g)?.to_text(&t);
    let text = if o.json {
        serde_json::to_string_pretty(&json!({"g": g.fmt(&t), "input": poly.to_text(&t), "output": out})).expect("json")
            + "\n"
    } else {
        out + "\n"
    };
    Ok((0, text))
}

/// Each monomial outside the two pure terms is rewritten to the normal form of
/// the lightest monomial in its weight class; the result is zero exactly when
/// the input lies in the ideal.
fn reduce(o: &Opts) -> Result<(i32, String)> {
    let f = o.f.or_else(|| o.r.as_ref().map(|r| r.split(',').count())).unwrap_or(1);
    let t = Tower::new(o.need_p()?, f)?;
    let poly = parse_poly(&t, o, f)?;
    let profile = poly.profile().to_vec();
    let q = t.q() as usize;
    let rw = Rewriter::new(&t, &profile)?;
    let pure_x = vec![0; f];
    let extreme = |d: &[usize]| d == pure_x.as_slice() || d == profile.as_slice();
    let terms: Vec<(Vec<usize>, u32)> = poly.terms().collect();
    let mut anchors: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (d, _) in terms.iter().filter(|(d, _)| !extreme(d)) {
        let w = rw.weight(d);
        let slot = anchors.entry(w % (q - 1)).or_insert_with(|| d.clone());
        if rw.weight(slot) > w {
            *slot = d.clone();
        }
    }
    let mut out = MultiPoly::zero(&profile);
    let mut certs = Vec::new();
    for (d, c) in &terms {
        if extreme(d) {
            out.set_coeff(d, t.add(out.coeff(d), *c));
            continue;
        }
        let anchor = &anchors[&(rw.weight(d) % (q - 1))];
        let cert = rw.reduce_pair(d, anchor)?;
        let nf = cert.normal_form.clone();
        out.set_coeff(&nf, t.add(out.coeff(&nf), *c));
        certs.push(json!({"monomial": d, "coeff": t.fmt(*c), "certificate": cert}));
    }
    let member = ideal_component(&t, &profile, &vec![1; f]).member(&t, &poly)?;
    let nf_text = out.to_text(&t);
    let nf_text = if out.is_zero() { "0".to_string() } else { nf_text };
    // The rewrite and the membership oracle must agree.
    let code = if out.is_zero() == member { 0 } else { 1 };
    let text = if o.json {
        let v = json!({
            "profile": profile,
            "normal_form": nf_text,
            "in_ideal": member,
            "terms": certs,
        });
        serde_json::to_string_pretty(&v).expect("json") + "\n"
    } else {
        let mut s = format!("normal form: {nf_text}\nin ideal: {member}\n");
        for c in &certs {
            s.push_str(&format!("  {}\n", c));
        }
        s
    };
    Ok((code, text))
}

fn dims(o: &Opts) -> Result<(i32, String)> {
    let p = o.need_p()?;
    let r = o.need_r()?;
    let f = o.slots(&r)?;
    let m = o.need_m()?;
    if m.len() != f {
        return Err(Error::ProfileMismatch { expected: r.clone(), got: m.clone() });
    }
    let t = Tower::new(p, f)?;
    let q = t.q() as usize;
    let formula = (q + 1) * m.iter().map(|x| x + 1).product::<usize>();
    let exps: Vec<usize> = m.iter().map(|x| x + 1).collect();
    let ideal_quotient = profile_dim(&r) - ideal_component(&t, &r, &exps).dim();
    let sq = verify_successive_quotients(p, &r, &m)?;
    let text = if o.json {
        let v = json!({
            "formula": formula,
            "ideal_quotient": ideal_quotient,
            "domain": profile_dim(&r),
            "steps": sq.dims,
        });
        serde_json::to_string_pretty(&v).expect("json") + "\n"
    } else {
        let steps: Vec<String> = sq.dims.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "{formula}\n  (q+1)∏(m_l+1) = {formula}; dim V/ideal = {ideal_quotient} of {}\n  chain: {}\n",
            profile_dim(&r),
            steps.join(" ")
        )
    };
    Ok((0, text))
}
