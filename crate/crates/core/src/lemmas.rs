//! Property suites for the identities the main maps rest on: the falling
//! factorial sum, directional derivatives (scaling, chain rule, Leibniz),
//! derivatives of Dickson powers, vanishing ideals, divisibility under the
//! Serre operator, the flip/flop relations and rewrite certificates.
//!
//! Each suite returns one check; `verify_lemmas` runs them all.

use crate::diffop::{serre_apply, NablaOp, SerreOp};
use crate::error::Result;
use crate::gf::{binom_mod, falling, falling_int, Fe, Tower};
use crate::grp::Group;
use crate::linalg::Subspace;
use crate::poly::{decode, profile_dim, twisted_point, MultiPoly};
use crate::report::Report;
use crate::rep::{flipflop_reduce, torus_fi};
use crate::theta::{
    dickson, dickson_q, divides_theta_power, evaluation_matrix, ideal, twisted_dickson, vanishing_membership_check, verify_certificate,
    Rewriter,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Outcome of one suite: pass flag, detail line and number of cases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub pass: bool,
    pub detail: String,
    pub cases: usize,
}

impl SuiteOutcome {
    fn new(failures: &[String], cases: usize) -> SuiteOutcome {
        let detail = match failures.first() {
            None => format!("{cases} cases"),
            Some(f) => format!("{} of {cases} cases fail; first: {f}", failures.len()),
        };
        SuiteOutcome { pass: failures.is_empty(), detail, cases }
    }
}

type Suite = fn(u64) -> Result<SuiteOutcome>;

/// Suite names, in report order.
pub const SUITES: &[(&str, Suite)] = &[
    ("falling_sum", falling_sum),
    ("scaled_evaluation", scaled_evaluation),
    ("scaled_evaluation_twisted", scaled_evaluation_twisted),
    ("nabla_partials", nabla_partials),
    ("chain_rule", chain_rule),
    ("leibniz", leibniz),
    ("theta_derivatives", theta_derivatives),
    ("theta_prime_derivatives", theta_prime_derivatives),
    ("twisted_theta_derivatives", twisted_theta_derivatives),
    ("vanishing_single_slot", vanishing_single_slot),
    ("vanishing_twisted", vanishing_twisted),
    ("monomial_differences", monomial_differences),
    ("serre_divisibility", serre_divisibility),
    ("flip_flop", flip_flop),
    ("rewrite_certificates", rewrite_certificates),
];

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn pick(rng: &mut ChaCha8Rng, xs: &[Fe]) -> Fe {
    xs[rng.gen_range(0..xs.len())]
}

fn random_poly(t: &Tower, profile: &[usize], rng: &mut ChaCha8Rng) -> MultiPoly {
    crate::psmaps::random_poly(t, profile, rng)
}

/// Σ_m C(k,m)[r−j]_{t−l−m}[j]_{l+m} = [r−t+k]_k[r−j]_{t−k−l}[j]_l over Z and mod p.
///
/// The identity needs l ≤ t − k: at k = t = l = 1 the left side is
/// [r−j]_0[j]_1 + [r−j]_{−1}[j]_2 = j while the right side has [r−j]_{−1} = 0.
pub fn falling_sum(_seed: u64) -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let mut cases = 0;
    for t in 0..=6i64 {
        for k in 0..=t {
            for l in 0..=t - k {
                for j in 0..=6i64 {
                    for r in j..=j + 14 {
                        cases += 1;
                        let lhs: i128 = (0..=k)
                            .map(|m| {
                                binom_int(k, m) * falling_int(r - j, t - l - m) * falling_int(j, l + m)
                            })
                            .sum();
                        let rhs = falling_int(r - t + k, k) * falling_int(r - j, t - k - l) * falling_int(j, l);
                        if lhs != rhs {
                            fails.push(format!("Z: t={t} k={k} l={l} j={j} r={r}: {lhs} vs {rhs}"));
                        }
                        for p in [3u32, 5, 7] {
                            let pp = p as u64;
                            let lhs = (0..=k).fold(0u64, |acc, m| {
                                let term = binom_mod(k as u64, m as u64, p) as u64
                                    * falling(r - j, t - l - m, p) as u64
                                    % pp
                                    * falling(j, l + m, p) as u64;
                                (acc + term) % pp
                            });
                            let rhs = falling(r - t + k, k, p) as u64 * falling(r - j, t - k - l, p) as u64 % pp
                                * falling(j, l, p) as u64
                                % pp;
                            if lhs != rhs {
                                fails.push(format!("p={p}: t={t} k={k} l={l} j={j} r={r}"));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(SuiteOutcome::new(&fails, cases))
}

fn binom_int(n: i64, k: i64) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    falling_int(n, k) / falling_int(k, k)
}

/// ∇^{t−k}∇′^k(P) at (zc, zd) against z^{r−t}[r−t+k]_k ∇^{t−k}(P) at (c, d),
/// exhaustive over p = 3, r ≤ 8, t ≤ min(3, r) and all of a, b, c, d, z.
pub fn scaled_evaluation(_seed: u64) -> Result<SuiteOutcome> {
    let t = Tower::new(3, 1)?;
    let fp: Vec<Fe> = (0..3).collect();
    let mut fails = Vec::new();
    let mut cases = 0;
    for r in 0..=8usize {
        for i in 0..=r {
            let poly = MultiPoly::basis(&[r], i);
            for tt in 0..=3.min(r) {
                for k in 0..=tt {
                    for &a in &fp {
                        for &b in &fp {
                            for &c in &fp {
                                for &d in &fp {
                                    let inner = NablaOp::new(0, c, d).apply(&t, k, &poly)?;
                                    let lhs_poly = NablaOp::new(0, a, b).apply(&t, tt - k, &inner)?;
                                    let rhs_poly = NablaOp::new(0, a, b).apply(&t, tt - k, &poly)?;
                                    let base = rhs_poly.evaluate(&t, &[(c, d)])?;
                                    let coef = falling((r - tt + k) as i64, k as i64, 3);
                                    for &z in &fp {
                                        cases += 1;
                                        let lhs = lhs_poly.evaluate(&t, &[(t.mul(z, c), t.mul(z, d))])?;
                                        let rhs = t.mul(t.mul(t.pow(z, (r - tt) as u64), coef), base);
                                        if lhs != rhs {
                                            fails.push(format!(
                                                "r={r} i={i} t={tt} k={k} (a,b,c,d,z)=({a},{b},{c},{d},{z})"
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(SuiteOutcome::new(&fails, cases))
}

/// The scaling identity on one twisted slot of F_9 polynomials, with
/// z^{(r_j−t_j)p^j} as the scalar.
pub fn scaled_evaluation_twisted(seed: u64) -> Result<SuiteOutcome> {
    let t = Tower::new(3, 2)?;
    let fq = t.fq().to_vec();
    let mut rng = rng_for(seed, 2);
    let mut fails = Vec::new();
    let cases = 200;
    for case in 0..cases {
        let j = case % 2;
        let r = rng.gen_range(0..=7usize);
        let mut profile = vec![0; 2];
        profile[j] = r;
        let poly = random_poly(&t, &profile, &mut rng);
        let tt = rng.gen_range(0..=3.min(r));
        let k = rng.gen_range(0..=tt);
        let [a, b, c, d, z] = [0; 5].map(|_| pick(&mut rng, &fq));
        let inner = NablaOp::twisted(j, c, d).apply(&t, k, &poly)?;
        let lhs_poly = NablaOp::twisted(j, a, b).apply(&t, tt - k, &inner)?;
        let rhs_poly = NablaOp::twisted(j, a, b).apply(&t, tt - k, &poly)?;
        let lhs = lhs_poly.evaluate(&t, &twisted_point(&t, 2, t.mul(z, c), t.mul(z, d)))?;
        let pj = 3u64.pow(j as u32);
        let scalar = t.mul(t.pow(z, (r - tt) as u64 * pj), falling((r - tt + k) as i64, k as i64, 3));
        let rhs = t.mul(scalar, rhs_poly.evaluate(&t, &twisted_point(&t, 2, c, d))?);
        if lhs != rhs {
            fails.push(format!("case {case}: slot {j}, r={r} t={tt} k={k}"));
        }
    }
    Ok(SuiteOutcome::new(&fails, cases))
}

/// ∇^k by binomial expansion against k-fold a∂/∂X + b∂/∂Y built from partials.
pub fn nabla_partials(seed: u64) -> Result<SuiteOutcome> {
    let t = Tower::new(5, 1)?;
    let fq = t.fq().to_vec();
    let mut rng = rng_for(seed, 3);
    let mut fails = Vec::new();
    let cases = 200;
    for case in 0..cases {
        let r = rng.gen_range(0..=10usize);
        let k = rng.gen_range(0..=r.min(5));
        let poly = random_poly(&t, &[r], &mut rng);
        let (a, b) = (pick(&mut rng, &fq), pick(&mut rng, &fq));
        let mut cur = poly.clone();
        for _ in 0..k {
            let dx = cur.derive(&t, 0, false)?.scale(&t, a);
            let dy = cur.derive(&t, 0, true)?.scale(&t, b);
            cur = dx.add(&t, &dy)?;
        }
        if NablaOp::new(0, a, b).apply(&t, k, &poly)? != cur {
            fails.push(format!("case {case}: r={r} k={k}"));
        }
    }
    Ok(SuiteOutcome::new(&fails, cases))
}

/// (a∂X + b∂Y)^k(P∘g) at (c, d) against the transformed direction applied to P
/// at g·(c, d); 250 cases over F_5 and 250 twisted cases over F_9.
pub fn chain_rule(seed: u64) -> Result<SuiteOutcome> {
    let towers = [Tower::new(5, 1)?, Tower::new(3, 2)?];
    let groups = [Group::new(&towers[0])?, Group::new(&towers[1])?];
    let mut rng = rng_for(seed, 4);
    let mut fails = Vec::new();
    let cases = 500;
    for case in 0..cases {
        let which = case % 2;
        let (t, grp) = (&towers[which], &groups[which]);
        let f = t.f();
        let fq = t.fq().to_vec();
        let profile: Vec<usize> = (0..f).map(|_| rng.gen_range(0..=6usize)).collect();
        let j = rng.gen_range(0..f);
        let k = rng.gen_range(0..=profile[j].min(4));
        let poly = random_poly(t, &profile, &mut rng);
        let g = grp.elements()[rng.gen_range(0..grp.order())];
        let [a, b, c, d] = [0; 4].map(|_| pick(&mut rng, &fq));
        // g = (u v; w z) substitutes X → uX + wY, Y → vX + zY.
        let (u, v, w, z) = (g.a, g.b, g.c, g.d);
        let moved = poly.substitute_linear(t, &g)?;
        let lhs = NablaOp::twisted(j, a, b).apply(t, k, &moved)?.evaluate(t, &twisted_point(t, f, c, d))?;
        let dir = (t.add(t.mul(u, a), t.mul(w, b)), t.add(t.mul(v, a), t.mul(z, b)));
        let pt = (t.add(t.mul(u, c), t.mul(w, d)), t.add(t.mul(v, c), t.mul(z, d)));
        let rhs = NablaOp::twisted(j, dir.0, dir.1).apply(t, k, &poly)?.evaluate(t, &twisted_point(t, f, pt.0, pt.1))?;
        if lhs != rhs {
            fails.push(format!("case {case}: q={} g={} slot {j} k={k}", t.q(), g.fmt(t)));
        }
    }
    Ok(SuiteOutcome::new(&fails, cases))
}

/// ∇^m(fg) = Σ C(m,i)∇^{m−i}(f)∇^i(g) over F_5, m ≤ 4.
pub fn leibniz(seed: u64) -> Result<SuiteOutcome> {
    let t = Tower::new(5, 1)?;
    let fq = t.fq().to_vec();
    let mut rng = rng_for(seed, 5);
    let mut fails = Vec::new();
    let cases = 500;
    for case in 0..cases {
        let (r1, r2) = (rng.gen_range(0..=6usize), rng.gen_range(0..=6usize));
        let m = rng.gen_range(0..=4.min(r1 + r2));
        let f = random_poly(&t, &[r1], &mut rng);
        let g = random_poly(&t, &[r2], &mut rng);
        let op = NablaOp::new(0, pick(&mut rng, &fq), pick(&mut rng, &fq));
        let lhs = op.apply(&t, m, &f.multiply(&t, &g)?)?;
        let mut rhs = MultiPoly::zero(&[r1 + r2 - m]);
        for i in 0..=m {
            if m - i > r1 || i > r2 {
                continue;
            }
            let term = op.apply(&t, m - i, &f)?.multiply(&t, &op.apply(&t, i, &g)?)?;
            rhs = rhs.add(&t, &term.scale(&t, binom_mod(m as u64, i as u64, 5)))?;
        }
        if lhs != rhs {
            fails.push(format!("case {case}: r=({r1},{r2}) m={m}"));
        }
    }
    Ok(SuiteOutcome::new(&fails, cases))
}

/// The value ∇^l(θ^k)|_(c,d) is l!(∇θ|_(c,d))^l when k = l and 0 otherwise.
fn theta_grid(t: &Tower, theta: &MultiPoly, op: NablaOp, pt: (Fe, Fe), kmax: usize) -> Result<Vec<(usize, usize)>> {
    let p = t.p();
    let d1 = op.apply(t, 1, theta)?.evaluate(t, &[pt])?;
    let mut bad = Vec::new();
    for k in 0..=kmax {
        let pk = theta.pow(t, k);
        for l in 0..=kmax {
            let got = op.apply(t, l, &pk)?;
            let got = if got.profile()[0] + l == pk.profile()[0] { got.evaluate(t, &[pt])? } else { 0 };
            let want = if k == l { t.mul(falling(l as i64, l as i64, p), t.pow(d1, l as u64)) } else { 0 };
            if got != want {
                bad.push((k, l));
            }
        }
    }
    Ok(bad)
}

/// θ = X^pY − XY^p: exhaustive in a, b, c, d over F_p for p ∈ {3, 5}, k, l ≤ 4.
pub fn theta_derivatives(_seed: u64) -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let mut cases = 0;
    for p in [3u64, 5] {
        let t = Tower::new(p, 1)?;
        let th = dickson(&t);
        let fp: Vec<Fe> = (0..p as Fe).collect();
        for &a in &fp {
            for &b in &fp {
                for &c in &fp {
                    for &d in &fp {
                        cases += 25;
                        for (k, l) in theta_grid(&t, &th, NablaOp::new(0, a, b), (c, d), 4)? {
                            fails.push(format!("p={p} (a,b,c,d)=({a},{b},{c},{d}) k={k} l={l}"));
                        }
                    }
                }
            }
        }
    }
    Ok(SuiteOutcome::new(&fails, cases))
}

/// θ′ = X^qY − XY^q over F_9 with direction (a^{p^j}, b^{p^j}) at (c^{p^j}, d^{p^j}).
pub fn theta_prime_derivatives(seed: u64) -> Result<SuiteOutcome> {
    let t = Tower::new(3, 2)?;
    let th = dickson_q(&t);
    let fq = t.fq().to_vec();
    let mut rng = rng_for(seed, 7);
    let mut fails = Vec::new();
    let samples = 30;
    for s in 0..samples {
        let j = s % 2;
        let [a, b, c, d] = [0; 4].map(|_| pick(&mut rng, &fq));
        let fr = |x: Fe| t.frobenius(x, j as i64);
        let op = NablaOp::new(0, fr(a), fr(b));
        for (k, l) in theta_grid(&t, &th, op, (fr(c), fr(d)), 2)? {
            fails.push(format!("j={j} (a,b,c,d)=({a},{b},{c},{d}) k={k} l={l}"));
        }
    }
    Ok(SuiteOutcome::new(&fails, samples * 9))
}

/// Π∇_j^{l_j}(Πθ_j^{k_j}) at the twisted point over F_9, all l_j, k_j ≤ p − 1.
pub fn twisted_theta_derivatives(seed: u64) -> Result<SuiteOutcome> {
    let t = Tower::new(3, 2)?;
    let f = 2;
    let p = t.p();
    let fq = t.fq().to_vec();
    let thetas = [twisted_dickson(&t, f, 0)?, twisted_dickson(&t, f, 1)?];
    let mut products = Vec::new();
    for k0 in 0..p as usize {
        for k1 in 0..p as usize {
            products.push(((k0, k1), thetas[0].pow(&t, k0).multiply(&t, &thetas[1].pow(&t, k1))?));
        }
    }
    let mut rng = rng_for(seed, 8);
    let mut fails = Vec::new();
    let mut cases = 0;
    for _ in 0..20 {
        let [a, b, c, d] = [0; 4].map(|_| pick(&mut rng, &fq));
        let pt = twisted_point(&t, f, c, d);
        let ops = [NablaOp::twisted(0, a, b), NablaOp::twisted(1, a, b)];
        let first: Vec<Fe> =
            (0..f).map(|j| ops[j].apply(&t, 1, &thetas[j])?.evaluate(&t, &pt)).collect::<Result<_>>()?;
        for ((k0, k1), prod) in &products {
            for l0 in 0..p as usize {
                for l1 in 0..p as usize {
                    cases += 1;
                    let got = if l0 > prod.profile()[0] || l1 > prod.profile()[1] {
                        0
                    } else {
                        let step = ops[0].apply(&t, l0, prod)?;
                        ops[1].apply(&t, l1, &step)?.evaluate(&t, &pt)?
                    };
                    let want = if (l0, l1) == (*k0, *k1) {
                        [(l0, first[0]), (l1, first[1])].iter().fold(1, |acc, &(l, v)| {
                            t.mul(acc, t.mul(falling(l as i64, l as i64, p), t.pow(v, l as u64)))
                        })
                    } else {
                        0
                    };
                    if got != want {
                        fails.push(format!("(a,b,c,d)=({a},{b},{c},{d}) k=({k0},{k1}) l=({l0},{l1})"));
                    }
                }
            }
        }
    }
    Ok(SuiteOutcome::new(&fails, cases))
}

/// Polynomials vanishing on all F_q-points form ⟨θ⟩ (q = 3, 5) and ⟨θ′⟩ (q = 9).
pub fn vanishing_single_slot(_seed: u64) -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let mut cases = 0;
    for (p, f, rmax) in [(3u64, 1usize, 16usize), (5, 1, 20), (3, 2, 24)] {
        let t = Tower::new(p, f)?;
        for r in 0..=rmax {
            cases += 1;
            if !vanishing_membership_check(&t, &[r])? {
                fails.push(format!("q={} r={r}", t.q()));
            }
        }
    }
    Ok(SuiteOutcome::new(&fails, cases))
}

/// Polynomials vanishing on the twisted diagonal over F_9 form ⟨θ_0, θ_1⟩
/// once r_j ≥ p^{f−j}, the degree bound the rewriting steps need.
///
/// Below the bound the coincidence can fail; the detail records how often
/// on r_0 ≤ 7, r_1 ≤ 5 without counting it as a failure.
pub fn vanishing_twisted(_seed: u64) -> Result<SuiteOutcome> {
    let t = Tower::new(3, 2)?;
    let mut fails = Vec::new();
    let mut cases = 0;
    for r0 in 9..=12 {
        for r1 in 3..=6 {
            cases += 1;
            if !vanishing_membership_check(&t, &[r0, r1])? {
                fails.push(format!("profile ({r0},{r1})"));
            }
        }
    }
    let mut below = 0;
    for r0 in 0..=7 {
        for r1 in 0..=5 {
            below += !vanishing_membership_check(&t, &[r0, r1])? as usize;
        }
    }
    let mut out = SuiteOutcome::new(&fails, cases);
    out.detail = format!("{} ({below} of 48 profiles below the degree bound differ)", out.detail);
    Ok(out)
}

/// The vanishing space on the twisted diagonal is spanned by differences of
/// non-extreme monomials whose weights Σ i_j p^j agree mod q − 1.
pub fn monomial_differences(_seed: u64) -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let mut cases = 0;
    for (p, f) in [(3u64, 2usize), (3, 1), (5, 1)] {
        let t = Tower::new(p, f)?;
        let q = t.q() as usize;
        let profiles: Vec<Vec<usize>> = if f == 2 {
            (0..=7).flat_map(|a| (0..=5).map(move |b| vec![a, b])).chain([vec![10, 4]]).collect()
        } else {
            (0..=14).map(|r| vec![r]).collect()
        };
        for profile in profiles {
            cases += 1;
            let dim = profile_dim(&profile);
            let weight = |i: &[usize]| i.iter().rev().fold(0, |acc, &d| acc * p as usize + d);
            let inner: Vec<usize> = (1..dim.saturating_sub(1)).collect();
            let mut diffs = Vec::new();
            for &a in &inner {
                for &b in &inner {
                    if a < b && weight(&decode(&profile, a)) % (q - 1) == weight(&decode(&profile, b)) % (q - 1) {
                        let mut v = vec![0; dim];
                        v[a] = 1;
                        v[b] = t.neg(1);
                        diffs.push(v);
                    }
                }
            }
            let span = Subspace::from_vectors(&t, dim, &diffs);
            if evaluation_matrix(&t, &profile).kernel(&t) != span {
                fails.push(format!("q={q} profile {profile:?}"));
            }
        }
    }
    Ok(SuiteOutcome::new(&fails, cases))
}

/// θ^{m+1} | D(Q) ⟺ θ^{m+1} | Q over F_5 for m ≤ 2 and p ∤ C(r, m+1).
///
/// Half the cases are built as θ^{m+1}·R plus an optional perturbation so
/// both sides of the biconditional are exercised.
pub fn serre_divisibility(seed: u64) -> Result<SuiteOutcome> {
    let t = Tower::new(5, 1)?;
    let p = 5usize;
    let fq = t.fq().to_vec();
    let th = dickson(&t);
    let mut rng = rng_for(seed, 11);
    let mut fails = Vec::new();
    let mut divisible = 0;
    let cases = 200;
    let mut done = 0;
    while done < cases {
        let m = rng.gen_range(0..=2usize);
        let r = rng.gen_range(1..=24usize);
        if binom_mod(r as u64, (m + 1) as u64, p as u32) == 0 {
            continue;
        }
        let need = (m + 1) * (p + 1);
        let mut q = if done % 2 == 0 && r >= need {
            let rest = random_poly(&t, &[r - need], &mut rng);
            th.pow(&t, m + 1).multiply(&t, &rest)?
        } else {
            random_poly(&t, &[r], &mut rng)
        };
        if done % 6 == 4 {
            let i = rng.gen_range(0..=r);
            let mut c = q.coeffs().to_vec();
            c[i] = t.add(c[i], pick(&mut rng, &fq[1..]));
            q = MultiPoly::from_coeffs(&[r], c)?;
        }
        done += 1;
        let dq = serre_apply(&t, SerreOp::Classical, &q)?;
        let (lhs, rhs) = (divides_theta_power(&t, &dq, m), divides_theta_power(&t, &q, m));
        divisible += rhs as usize;
        if lhs != rhs {
            fails.push(format!("r={r} m={m} Q={}", q.to_text(&t)));
        }
    }
    let mut out = SuiteOutcome::new(&fails, cases);
    out.detail = format!("{} ({divisible} divisible)", out.detail);
    Ok(out)
}

/// f_i as functions on G for q ∈ {3, 5}: every f_i with i ≤ e + q² − 1 equals
/// its flip/flop reduction, and each flop relation sums to zero.
pub fn flip_flop(_seed: u64) -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let mut cases = 0;
    for p in [3u64, 5] {
        let t = Tower::new(p, 1)?;
        let grp = Group::new(&t)?;
        let q = p;
        let q2 = q * q;
        for e in [0, 1, q - 2, q - 1] {
            let basis: Vec<Vec<Fe>> = (0..q2 - q).map(|i| torus_fi(&t, &grp, e, i)).collect::<Result<_>>()?;
            for i in 0..=e + q2 - 1 {
                cases += 1;
                let direct = torus_fi(&t, &grp, e, i)?;
                let coords = flipflop_reduce(&t, e, i)?;
                let mut combo = vec![0; direct.len()];
                for (c, f) in coords.iter().zip(&basis) {
                    for (x, &y) in combo.iter_mut().zip(f) {
                        *x = t.add(*x, t.mul(*c, y));
                    }
                }
                if combo != direct {
                    fails.push(format!("q={q} e={e} i={i}"));
                }
            }
            for j in 0..=q - 2 {
                cases += 1;
                let mut sum = torus_fi(&t, &grp, e, j + q2 - q)?;
                for k in 0..q {
                    let f = torus_fi(&t, &grp, e, j + k * (q - 1))?;
                    for (x, y) in sum.iter_mut().zip(f) {
                        *x = t.add(*x, y);
                    }
                }
                if sum.iter().any(|&x| x != 0) {
                    fails.push(format!("flop q={q} e={e} j={j}"));
                }
            }
        }
    }
    Ok(SuiteOutcome::new(&fails, cases))
}

/// Every admissible pair of monomials gets a certificate whose steps all lie
/// in ⟨θ_0, …, θ_{f−1}⟩; exhaustive for (10, 4) over F_9 and 12 over F_5.
pub fn rewrite_certificates(_seed: u64) -> Result<SuiteOutcome> {
    let mut fails = Vec::new();
    let mut cases = 0;
    for (p, f, profile) in [(3u64, 2usize, vec![10usize, 4]), (5, 1, vec![12])] {
        let t = Tower::new(p, f)?;
        let q = t.q() as usize;
        let rw = Rewriter::new(&t, &profile)?;
        let i1 = ideal(&t, &profile, &vec![1; f])?;
        let monos: Vec<Vec<usize>> =
            (0..profile_dim(&profile)).map(|i| decode(&profile, i)).collect();
        let pure_x = vec![0; f];
        let extreme = |d: &[usize]| d == pure_x.as_slice() || d == profile.as_slice();
        for a in &monos {
            for b in &monos {
                let (wa, wb) = (rw.weight(a), rw.weight(b));
                if wa > wb || (wb - wa) % (q - 1) != 0 || (extreme(a) || extreme(b)) && a != b {
                    continue;
                }
                cases += 1;
                let ok = match rw.reduce_pair(a, b) {
                    Ok(cert) => verify_certificate(&t, &rw, &i1, a, b, &cert)?,
                    Err(_) => false,
                };
                if !ok {
                    fails.push(format!("q={q} {a:?} ~ {b:?}"));
                }
            }
        }
    }
    Ok(SuiteOutcome::new(&fails, cases))
}

/// Run every suite; one check per suite, case counts in the dimension table.
pub fn verify_lemmas(seed: u64) -> Result<Report> {
    let mut rep = Report::new("lemmas");
    rep.param("seed", seed);
    let outcomes: Vec<Result<SuiteOutcome>> = SUITES.par_iter().map(|(_, run)| run(seed)).collect();
    for ((name, _), out) in SUITES.iter().zip(outcomes) {
        let out = out?;
        rep.check(name, out.pass, out.detail);
        rep.dim(&format!("cases.{name}"), out.cases);
    }
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn falling_sum_holds() {
        let out = falling_sum(0).unwrap();
        assert!(out.pass, "{}", out.detail);
    }

    #[test]
    fn falling_sum_needs_l_at_most_t_minus_k() {
        // k = t = l = 1: the left side is j, the right side vanishes.
        let (r, j) = (5i64, 2i64);
        let lhs: i128 = (0..=1).map(|m| binom_int(1, m) * falling_int(r - j, -m) * falling_int(j, 1 + m)).sum();
        let rhs = falling_int(r, 1) * falling_int(r - j, -1) * falling_int(j, 1);
        assert_eq!((lhs, rhs), (j as i128, 0));
    }

    #[test]
    fn scaled_evaluation_holds() {
        let out = scaled_evaluation(0).unwrap();
        assert!(out.pass, "{}", out.detail);
        let out = scaled_evaluation_twisted(1).unwrap();
        assert!(out.pass, "{}", out.detail);
    }

    #[test]
    fn derivative_rules_hold() {
        for run in [nabla_partials, chain_rule, leibniz] {
            let out = run(3).unwrap();
            assert!(out.pass, "{}", out.detail);
        }
    }

    #[test]
    fn theta_derivative_grids() {
        for run in [theta_derivatives, theta_prime_derivatives, twisted_theta_derivatives] {
            let out = run(4).unwrap();
            assert!(out.pass, "{}", out.detail);
        }
    }

    #[test]
    fn theta_derivative_by_hand() {
        // ∂/∂Y of X^pY − XY^p is X^p over F_p.
        let t = Tower::new(5, 1).unwrap();
        let d = NablaOp::new(0, 0, 1).apply(&t, 1, &dickson(&t)).unwrap();
        assert_eq!(d, MultiPoly::parse(&t, "X0^5", 1).unwrap());
    }

    #[test]
    fn divisibility_and_ideals() {
        for run in [vanishing_single_slot, vanishing_twisted, monomial_differences, serre_divisibility] {
            let out = run(5).unwrap();
            assert!(out.pass, "{}", out.detail);
        }
    }

    #[test]
    fn flip_flop_and_certificates() {
        for run in [flip_flop, rewrite_certificates] {
            let out = run(6).unwrap();
            assert!(out.pass, "{}", out.detail);
            assert!(out.cases > 0);
        }
    }

    #[test]
    fn report_is_deterministic() {
        let a = verify_lemmas(9).unwrap();
        let b = verify_lemmas(9).unwrap();
        assert!(a.pass(), "{}", a.render());
        assert_eq!(a.checks, b.checks);
        assert_eq!(a.dims, b.dims);
    }
}
