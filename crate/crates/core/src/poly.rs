//! Multihomogeneous polynomials in f variable pairs (X_j, Y_j).
//!
//! A polynomial of profile (r_0, …, r_{f−1}) is a dense table indexed by
//! (i_0, …, i_{f−1}) with 0 ≤ i_j ≤ r_j; entry i is the coefficient of
//! ∏ X_j^{r_j−i_j} Y_j^{i_j}. The flat index is mixed radix with slot 0
//! fastest, which fixes the monomial order used for every matrix.

use crate::error::{Error, Result};
use crate::gf::{Fe, Level, Tower};
use crate::grp::GroupElem;
use crate::linalg::Matrix;

pub use crate::gf::falling as falling_factorial;

/// Per-slot degrees (r_0, …, r_{f−1}).
pub type Profile = Vec<usize>;

/// Twisted total degree Σ r_j p^j.
pub fn twisted_degree(profile: &[usize], p: u32) -> u64 {
    profile.iter().rev().fold(0u64, |acc, &r| acc * p as u64 + r as u64)
}

/// Number of monomials ∏ (r_j + 1).
pub fn profile_dim(profile: &[usize]) -> usize {
    profile.iter().map(|r| r + 1).product()
}

/// Flat index of an exponent vector.
pub fn encode(profile: &[usize], exps: &[usize]) -> usize {
    let mut idx = 0;
    for j in (0..profile.len()).rev() {
        idx = idx * (profile[j] + 1) + exps[j];
    }
    idx
}

/// Exponent vector of a flat index.
pub fn decode(profile: &[usize], mut idx: usize) -> Vec<usize> {
    profile
        .iter()
        .map(|&r| {
            let e = idx % (r + 1);
            idx /= r + 1;
            e
        })
        .collect()
}

/// Point (x_0, y_0; …; x_{f−1}, y_{f−1}) at which polynomials are evaluated.
pub type EvalPoint = Vec<(Fe, Fe)>;

/// The twisted diagonal point (c, d; c^p, d^p; …).
pub fn twisted_point(t: &Tower, f: usize, c: Fe, d: Fe) -> EvalPoint {
    (0..f).map(|j| (t.frobenius(c, j as i64), t.frobenius(d, j as i64))).collect()
}

/// Dense multihomogeneous polynomial with coefficients in the top field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    profile: Profile,
    coeffs: Vec<Fe>,
}

impl MultiPoly {
    pub fn zero(profile: &[usize]) -> MultiPoly {
        MultiPoly { profile: profile.to_vec(), coeffs: vec![0; profile_dim(profile)] }
    }

    /// Build from a coefficient table in flat-index order.
    pub fn from_coeffs(profile: &[usize], coeffs: Vec<Fe>) -> Result<MultiPoly> {
        if coeffs.len() != profile_dim(profile) {
            return Err(Error::IndexOutOfRange { index: coeffs.len(), max: profile_dim(profile) });
        }
        Ok(MultiPoly { profile: profile.to_vec(), coeffs })
    }

    /// c · ∏ X_j^{r_j−i_j} Y_j^{i_j}.
    pub fn monomial(profile: &[usize], exps: &[usize], c: Fe) -> MultiPoly {
        let mut p = MultiPoly::zero(profile);
        p.coeffs[encode(profile, exps)] = c;
        p
    }

    /// Basis monomial with flat index `idx`.
    pub fn basis(profile: &[usize], idx: usize) -> MultiPoly {
        let mut p = MultiPoly::zero(profile);
        p.coeffs[idx] = 1;
        p
    }

    /// Classical f = 1 polynomial Σ c_i X^{r−i} Y^i.
    pub fn univariate(r: usize, coeffs: &[Fe]) -> MultiPoly {
        let mut p = MultiPoly::zero(&[r]);
        p.coeffs[..coeffs.len()].copy_from_slice(coeffs);
        p
    }

    pub fn profile(&self) -> &[usize] {
        &self.profile
    }

    pub fn f(&self) -> usize {
        self.profile.len()
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fe> {
        self.coeffs
    }

    pub fn coeff(&self, exps: &[usize]) -> Fe {
        self.coeffs[encode(&self.profile, exps)]
    }

    pub fn set_coeff(&mut self, exps: &[usize], c: Fe) {
        let i = encode(&self.profile, exps);
        self.coeffs[i] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Smallest tower level holding every coefficient.
    pub fn level(&self, t: &Tower) -> Level {
        let mut lvl = Level::Base;
        for &c in &self.coeffs {
            match t.level_of(c) {
                Level::Top => return Level::Top,
                Level::Mid => lvl = Level::Mid,
                Level::Base => {}
            }
        }
        lvl
    }

    /// Nonzero terms as (exponent vector, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, Fe)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (decode(&self.profile, i), c))
    }

    fn check_same(&self, o: &MultiPoly) -> Result<()> {
        if self.profile != o.profile {
            return Err(Error::ProfileMismatch { expected: self.profile.clone(), got: o.profile.clone() });
        }
        Ok(())
    }

    pub fn add(&self, t: &Tower, o: &MultiPoly) -> Result<MultiPoly> {
        self.check_same(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| t.add(a, b)).collect();
        Ok(MultiPoly { profile: self.profile.clone(), coeffs })
    }

    pub fn sub(&self, t: &Tower, o: &MultiPoly) -> Result<MultiPoly> {
        self.check_same(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| t.sub(a, b)).collect();
        Ok(MultiPoly { profile: self.profile.clone(), coeffs })
    }

    pub fn scale(&self, t: &Tower, c: Fe) -> MultiPoly {
        MultiPoly { profile: self.profile.clone(), coeffs: self.coeffs.iter().map(|&a| t.mul(a, c)).collect() }
    }

    /// Product; slot degrees add.
    pub fn multiply(&self, t: &Tower, o: &MultiPoly) -> Result<MultiPoly> {
        if self.f() != o.f() {
            return Err(Error::ProfileMismatch { expected: self.profile.clone(), got: o.profile.clone() });
        }
        let profile: Profile = self.profile.iter().zip(&o.profile).map(|(a, b)| a + b).collect();
        let mut out = MultiPoly::zero(&profile);
        let rhs: Vec<(Vec<usize>, Fe)> = o.terms().collect();
        let mut e = vec![0; profile.len()];
        for (ea, ca) in self.terms() {
            for (eb, cb) in &rhs {
                for j in 0..e.len() {
                    e[j] = ea[j] + eb[j];
                }
                let i = encode(&profile, &e);
                out.coeffs[i] = t.add(out.coeffs[i], t.mul(ca, *cb));
            }
        }
        Ok(out)
    }

    /// P^n.
    pub fn pow(&self, t: &Tower, n: usize) -> MultiPoly {
        let mut acc = MultiPoly::monomial(&vec![0; self.f()], &vec![0; self.f()], 1);
        for _ in 0..n {
            acc = acc.multiply(t, self).expect("same slot count");
        }
        acc
    }

    /// Formal partial derivative in X_j (`wrt_y = false`) or Y_j.
    pub fn derive(&self, t: &Tower, j: usize, wrt_y: bool) -> Result<MultiPoly> {
        if j >= self.f() {
            return Err(Error::SlotOutOfRange { slot: j, f: self.f() });
        }
        let r = self.profile[j];
        let mut profile = self.profile.clone();
        profile[j] = r.saturating_sub(1);
        let mut out = MultiPoly::zero(&profile);
        if r == 0 {
            return Ok(out);
        }
        for (mut e, c) in self.terms() {
            let i = e[j];
            let factor = if wrt_y { i } else { r - i };
            if factor % t.p() as usize == 0 {
                continue;
            }
            if wrt_y {
                e[j] = i - 1;
            }
            let k = encode(&profile, &e);
            out.coeffs[k] = t.add(out.coeffs[k], t.mul(c, t.from_int(factor as i64)));
        }
        Ok(out)
    }

    /// Per-slot power tables x_j^n, y_j^n for n ≤ r_j.
    fn power_tables(&self, t: &Tower, pt: &[(Fe, Fe)]) -> Vec<Vec<Fe>> {
        // entry i of slot j: x^{r−i} y^i
        self.profile
            .iter()
            .zip(pt)
            .map(|(&r, &(x, y))| (0..=r).map(|i| t.mul(t.pow(x, (r - i) as u64), t.pow(y, i as u64))).collect())
            .collect()
    }

    /// Value at a point with one coordinate pair per slot.
    pub fn evaluate(&self, t: &Tower, pt: &[(Fe, Fe)]) -> Result<Fe> {
        if pt.len() != self.f() {
            return Err(Error::ProfileMismatch { expected: self.profile.clone(), got: vec![pt.len()] });
        }
        let tables = self.power_tables(t, pt);
        Ok(tensor_functional(t, &tables, &self.coeffs))
    }

    /// P(b) − P(a).
    pub fn eval_diff(&self, t: &Tower, a: &[(Fe, Fe)], b: &[(Fe, Fe)]) -> Result<Fe> {
        Ok(t.sub(self.evaluate(t, b)?, self.evaluate(t, a)?))
    }

    /// The twisted substitution X_j ↦ a^{p^j}X_j + c^{p^j}Y_j, Y_j ↦ b^{p^j}X_j + d^{p^j}Y_j.
    pub fn substitute_linear(&self, t: &Tower, g: &GroupElem) -> Result<MultiPoly> {
        for x in [g.a, g.b, g.c, g.d] {
            if !t.in_level(x, Level::Mid) {
                return Err(Error::LevelMismatch(format!("matrix entry {} is not in F_q", t.fmt(x))));
            }
        }
        let mats: Vec<Matrix> =
            self.profile.iter().enumerate().map(|(j, &r)| slot_matrix(t, &g.frob(t, j), r)).collect();
        Ok(MultiPoly { profile: self.profile.clone(), coeffs: apply_slot_matrices(t, &mats, &self.profile, &self.coeffs) })
    }

    /// Canonical text form, terms in flat-index order.
    pub fn to_text(&self, t: &Tower) -> String {
        let mut out = Vec::new();
        for (e, c) in self.terms() {
            let mut factors = Vec::new();
            let mut any_var = false;
            let mut vars = Vec::new();
            for (j, (&r, &i)) in self.profile.iter().zip(&e).enumerate() {
                for (name, n) in [("X", r - i), ("Y", i)] {
                    if n > 0 {
                        any_var = true;
                        vars.push(if n == 1 { format!("{name}{j}") } else { format!("{name}{j}^{n}") });
                    }
                }
            }
            if c != 1 || !any_var {
                factors.push(t.fmt(c));
            }
            factors.extend(vars);
            out.push(factors.join("*"));
        }
        if out.is_empty() {
            "0".to_string()
        } else {
            out.join("+")
        }
    }

    /// Parse the text grammar with `f` slots, inferring the profile from the terms.
    pub fn parse(t: &Tower, s: &str, f: usize) -> Result<MultiPoly> {
        let terms = parse_terms(t, s, f)?;
        let profile: Profile = match terms.first() {
            Some((_, xs, ys)) => xs.iter().zip(ys).map(|(a, b)| a + b).collect(),
            None => vec![0; f],
        };
        build_from_terms(t, &profile, terms)
    }

    /// Parse with a fixed profile (needed for the zero polynomial).
    pub fn parse_with_profile(t: &Tower, s: &str, profile: &[usize]) -> Result<MultiPoly> {
        let terms = parse_terms(t, s, profile.len())?;
        build_from_terms(t, profile, terms)
    }
}

type Term = (Fe, Vec<usize>, Vec<usize>);

fn build_from_terms(t: &Tower, profile: &[usize], terms: Vec<Term>) -> Result<MultiPoly> {
    let mut out = MultiPoly::zero(profile);
    for (c, xs, ys) in terms {
        let got: Profile = xs.iter().zip(&ys).map(|(a, b)| a + b).collect();
        if got != profile {
            return Err(Error::ProfileMismatch { expected: profile.to_vec(), got });
        }
        let k = encode(profile, &ys);
        out.coeffs[k] = t.add(out.coeffs[k], c);
    }
    Ok(out)
}

// Split at top-level '+' and '-' into signed terms.
fn parse_terms(t: &Tower, s: &str, f: usize) -> Result<Vec<Term>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut depth = 0;
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        let splits = depth == 0 && (ch == '+' || ch == '-') && !matches!(prev, None | Some('^') | Some('*'));
        if splits {
            pieces.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else if ch == '-' && depth == 0 && prev.is_none() {
            neg = true;
        } else {
            cur.push(ch);
        }
        prev = Some(ch);
    }
    pieces.push((neg, cur));
    let mut out = Vec::new();
    for (neg, body) in pieces {
        if body.is_empty() {
            return Err(Error::Parse(format!("empty term in {s:?}")));
        }
        let mut c: Fe = 1;
        let mut xs = vec![0; f];
        let mut ys = vec![0; f];
        for factor in body.split('*') {
            let first = factor.chars().next().ok_or_else(|| Error::Parse(format!("empty factor in {body:?}")))?;
            if first == 'X' || first == 'Y' {
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<usize>().map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?),
                    None => (factor, 1),
                };
                let slot: usize = name[1..].parse().map_err(|_| Error::Parse(format!("bad variable {name:?}")))?;
                if slot >= f {
                    return Err(Error::SlotOutOfRange { slot, f });
                }
                if first == 'X' {
                    xs[slot] += exp;
                } else {
                    ys[slot] += exp;
                }
            } else {
                c = t.mul(c, t.parse(factor)?);
            }
        }
        if neg {
            c = t.neg(c);
        }
        out.push((c, xs, ys));
    }
    Ok(out)
}

/// Matrix of P ↦ P(aX+cY, bX+dY) on the monomial basis of V_r (columns = old index).
pub fn slot_matrix(t: &Tower, g: &GroupElem, r: usize) -> Matrix {
    let mut m = Matrix::zeros(r + 1, r + 1);
    // (aX+cY)^{r−i}(bX+dY)^i expanded; row k collects X^{r−k}Y^k.
    let mut binom = vec![vec![0u32; r + 1]; r + 1];
    for n in 0..=r {
        for k in 0..=n {
            binom[n][k] = crate::gf::binom_mod(n as u64, k as u64, t.p());
        }
    }
    for i in 0..=r {
        let mut first = vec![0; r + 1];
        for s in 0..=r - i {
            first[s] = t.mul(binom[r - i][s], t.mul(t.pow(g.a, (r - i - s) as u64), t.pow(g.c, s as u64)));
        }
        for u in 0..=i {
            let w = t.mul(binom[i][u], t.mul(t.pow(g.b, (i - u) as u64), t.pow(g.d, u as u64)));
            if w == 0 {
                continue;
            }
            for (s, &fs) in first.iter().enumerate().take(r - i + 1) {
                if fs != 0 {
                    let k = s + u;
                    m.set(k, i, t.add(m.get(k, i), t.mul(fs, w)));
                }
            }
        }
    }
    m
}

/// Apply one matrix per slot to a flat coefficient table (mode products).
pub fn apply_slot_matrices(t: &Tower, mats: &[Matrix], profile: &[usize], coeffs: &[Fe]) -> Vec<Fe> {
    let mut cur = coeffs.to_vec();
    let mut stride = 1;
    let mut out_profile = profile.to_vec();
    for (j, m) in mats.iter().enumerate() {
        let n_in = out_profile[j] + 1;
        let n_out = m.rows;
        let outer = cur.len() / (stride * n_in);
        let mut next = vec![0; stride * n_out * outer];
        for o in 0..outer {
            for s in 0..stride {
                for k in 0..n_out {
                    let row = m.row(k);
                    let mut acc = 0;
                    for i in 0..n_in {
                        let v = cur[(o * n_in + i) * stride + s];
                        if v != 0 && row[i] != 0 {
                            acc = t.add(acc, t.mul(row[i], v));
                        }
                    }
                    next[(o * n_out + k) * stride + s] = acc;
                }
            }
        }
        cur = next;
        out_profile[j] = n_out - 1;
        stride *= n_out;
    }
    cur
}

/// Σ_i coeffs[i] ∏_j tables[j][i_j]: a pure-tensor functional applied to a table.
pub fn tensor_functional(t: &Tower, tables: &[Vec<Fe>], coeffs: &[Fe]) -> Fe {
    let mut cur: Vec<Fe> = coeffs.to_vec();
    for tab in tables {
        let n = tab.len();
        let outer = cur.len() / n;
        let mut next = vec![0; outer];
        for (o, slot) in next.iter_mut().enumerate() {
            let mut acc = 0;
            for (i, &w) in tab.iter().enumerate() {
                let v = cur[o * n + i];
                if v != 0 && w != 0 {
                    acc = t.add(acc, t.mul(v, w));
                }
            }
            *slot = acc;
        }
        cur = next;
    }
    cur[0]
}
