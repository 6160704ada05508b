//! The ten acceptance criteria, one line each.
//!
//! Criterion 5 is expected to fail (the kernel of the twisted principal
//! series map is strictly larger than the θ-ideal component at (10, 4)).
//! The process exits nonzero only when a result differs from expectation,
//! including a known-red criterion turning green.

use modrep::cuspmaps::{verify_bigger_range, verify_cuspidal, verify_cuspidal_twisted, verify_higher_m, verify_r1};
use modrep::dualnum::verify_image;
use modrep::lemmas::verify_lemmas;
use modrep::psmaps::{verify_d_periodicity, verify_periodicity, verify_ps, verify_split, verify_split_case, PsConfig};
use modrep::report::Report;
use std::time::Instant;

const KNOWN_RED: &[usize] = &[5];
const SEED: u64 = 0x5eed;

fn dim(r: &Report, key: &str) -> usize {
    r.dims.get(key).copied().unwrap_or(usize::MAX)
}

fn summary(r: &Report) -> String {
    match r.failed().first() {
        None => format!("{} checks", r.checks.len()),
        Some(c) => format!("{} failed, first {}: {}", r.failed().len(), c.name, c.detail),
    }
}

type Outcome = (bool, String);

fn run(n: usize) -> modrep::Result<Outcome> {
    Ok(match n {
        1 => {
            let r = verify_ps(&PsConfig::new(5, &[22], &[2]))?;
            let ok = r.pass() && dim(&r, "quotient") == 18 && dim(&r, "induced") == 18 && dim(&r, "rank") == 18;
            (ok, format!("p=5 r=22 m=2: rank {}; {}", dim(&r, "rank"), summary(&r)))
        }
        2 => {
            let r = verify_split_case(5, 20)?;
            let ok = r.pass() && dim(&r, "summand_a") == 6 && dim(&r, "summand_d") == 6;
            (ok, format!("p=5 r=20: summands {}+{}; {}", dim(&r, "summand_a"), dim(&r, "summand_d"), summary(&r)))
        }
        3 => {
            let r = verify_split(5, 20, 2, 0)?;
            let ok = r.pass() && dim(&r, "quotient") == 18;
            (ok, format!("p=5 m=2 r=20 i=0: {}+{}; {}", dim(&r, "first"), dim(&r, "second"), summary(&r)))
        }
        4 => {
            let a = verify_periodicity(5, 2, 22, 18, SEED)?;
            let b = verify_d_periodicity(5, 18, 1)?;
            let ok = a.pass() && b.pass() && dim(&a, "quotient_s") == 18;
            (ok, format!("r=22 vs s=18: {}; D at r=18 m=1: {}", summary(&a), summary(&b)))
        }
        5 => {
            let r = verify_ps(&PsConfig::new(3, &[10, 4], &[1, 0]))?;
            let ok = r.pass() && dim(&r, "quotient") == 20;
            (ok, format!("p=3 f=2 r=(10,4) m=(1,0): kernel {} vs ideal {}; {}", dim(&r, "kernel"), dim(&r, "ideal"), summary(&r)))
        }
        6 => {
            let a = verify_cuspidal(5, 1)?;
            let b = verify_r1(5)?;
            let ok = a.pass() && b.pass() && dim(&a, "rank") == 20 && dim(&a, "induced") == 20 && dim(&b, "kernel") == 10;
            (ok, format!("p=5 r=1: rank {}; r=1 map kernel {}; {}; {}", dim(&a, "rank"), dim(&b, "kernel"), summary(&a), summary(&b)))
        }
        7 => {
            let a = verify_bigger_range(5, 0, 1)?;
            let b = verify_higher_m(5, 1, 1)?;
            let ok = a.pass() && b.pass();
            (ok, format!("bigger range p=5 r=0 k=1: {}; higher m p=5 r=1 m=1: {}", summary(&a), summary(&b)))
        }
        8 => {
            let r = verify_cuspidal_twisted(3, 2, 2)?;
            let ok = r.pass() && dim(&r, "dspan") == 7 && dim(&r, "lhs") == 72 && dim(&r, "rhs") == 72;
            (ok, format!("p=3 f=2 r0=2: span {}, lhs {} rhs {}; {}", dim(&r, "dspan"), dim(&r, "lhs"), dim(&r, "rhs"), summary(&r)))
        }
        9 => {
            let r = verify_image(3, 1, 12)?;
            let ok = r.pass() && dim(&r, "image") == 8 && dim(&r, "w") == 8;
            (ok, format!("p=3 m=1 r=12: image {}; {}", dim(&r, "image"), summary(&r)))
        }
        10 => {
            let r = verify_lemmas(SEED)?;
            (r.pass(), summary(&r))
        }
        _ => unreachable!(),
    })
}

fn main() {
    let mut unexpected = 0;
    for n in 1..=10 {
        let start = Instant::now();
        let (ok, detail) = match run(n) {
            Ok(o) => o,
            Err(e) => (false, format!("error: {e}")),
        };
        let red = KNOWN_RED.contains(&n);
        let verdict = match (ok, red) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected)",
        };
        if ok == red {
            unexpected += 1;
        }
        println!("criterion {n:>2}: {verdict} [{} ms] {detail}", start.elapsed().as_millis());
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected result(s)");
        std::process::exit(1);
    }
}
