//! Cuspidal comparison maps.
//!
//! The domain is ⊗_j V_{R_j}^{Fr^j} ⊗ ⊗_j V_{p−1}^{Fr^j} with R_0 = r_0 + p − 1
//! and R_j = p − 1 for j ≥ 1, and the target is ind_T^G ω^{r_0} for the
//! anisotropic torus T ≅ F_{q²}^*. With A = a + cα, B = b + dα the value of
//! ψ_{P⊗Q} at g is
//!
//!   ∇_0^{r_0−2}(P) at (A^{p^{f+j}}, B^{p^{f+j}})_j minus the same at (A^{p^j}, B^{p^j})_j,
//!   times ∏_j Q_j(A^{p^{f+j}}, B^{p^{f+j}}),
//!
//! where ∇_0 = A∂/∂X_0 + B∂/∂Y_0. Its kernel is ⟨D_0, …, D_{f−1}⟩ ⊗ (all Q).
//! For f = 1 this is the map with parameter r = r_0 − 2 and kernel D(V_{r+2}) ⊗ V_{p−1}.

use crate::diffop::{dj_domain, dj_equivariance_defect, nabla_eval_row, serre_apply, serre_power, NablaOp, SerreOp};
use crate::error::{Error, Result};
use crate::gf::{binom_mod, falling, Fe, Level, Tower};
use crate::grp::{torus_embed, Group, GroupElem};
use crate::linalg::{Matrix, Subspace};
use crate::poly::{decode, profile_dim, slot_matrix, MultiPoly, Profile};
use crate::psmaps::{literal_sample, random_poly};
use crate::rep::{flipflop_reduce, intertwiner_system, torus_fi, Datum, InducedSpace, Presentation, SymRep};
use crate::report::Report;
use crate::theta::{dickson, ideal_component};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Parameters of a cuspidal map: the prime, the degree f and r_0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspConfig {
    pub p: u64,
    pub f: usize,
    pub r0: usize,
}

impl CuspConfig {
    /// f = 1 with parameter r (0 ≤ r ≤ p − 3), i.e. r_0 = r + 2.
    pub fn base(p: u64, r: usize) -> Result<CuspConfig> {
        let c = CuspConfig { p, f: 1, r0: r + 2 };
        c.validate()?;
        Ok(c)
    }

    /// 2 ≤ r_0 ≤ p − 1.
    pub fn twisted(p: u64, f: usize, r0: usize) -> Result<CuspConfig> {
        let c = CuspConfig { p, f, r0 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if self.f == 0 {
            return Err(Error::RangeError("f must be at least 1".into()));
        }
        if self.r0 < 2 || self.r0 as u64 > self.p - 1 {
            return Err(Error::RangeError(format!("r_0 = {} outside 2..={}", self.r0, self.p - 1)));
        }
        Ok(())
    }

    /// (r_0 + p − 1, p − 1, …, p − 1).
    pub fn p_profile(&self) -> Profile {
        let p = self.p as usize;
        let mut v = vec![p - 1; self.f];
        v[0] = self.r0 + p - 1;
        v
    }

    /// (p − 1, …, p − 1).
    pub fn q_profile(&self) -> Profile {
        vec![self.p as usize - 1; self.f]
    }

    pub fn domain(&self) -> SymRep {
        SymRep::twisted(&self.p_profile()).tensor(&SymRep::twisted(&self.q_profile()))
    }

    pub fn datum(&self) -> Datum {
        Datum::Torus { m: 0, e: self.r0 as u64 }
    }

    /// dim ⟨D_0, …, D_{f−1}⟩ = r_0 p^{f−1} + 1.
    pub fn span_dim(&self) -> usize {
        self.r0 * (self.p as usize).pow(self.f as u32 - 1) + 1
    }
}

/// (A, B) = (a + cα, b + dα).
pub fn torus_coords(t: &Tower, g: &GroupElem) -> Result<(Fe, Fe)> {
    let al = t.alpha()?;
    Ok((t.add(g.a, t.mul(g.c, al)), t.add(g.b, t.mul(g.d, al))))
}

fn frob_pair(t: &Tower, (a, b): (Fe, Fe), k: usize) -> (Fe, Fe) {
    (t.frobenius(a, k as i64), t.frobenius(b, k as i64))
}

/// out[i·|fast| + j] = slow[i]·fast[j].
fn kron_vec(t: &Tower, slow: &[Fe], fast: &[Fe]) -> Vec<Fe> {
    let mut out = Vec::with_capacity(slow.len() * fast.len());
    for &s in slow {
        for &x in fast {
            out.push(t.mul(s, x));
        }
    }
    out
}

/// Rows of the P-part and the Q-part of ψ at g.
fn cusp_rows(t: &Tower, cfg: &CuspConfig, g: &GroupElem) -> (Vec<Fe>, Vec<Fe>) {
    let ab = torus_coords(t, g).expect("odd characteristic");
    let pp = cfg.p_profile();
    let qdeg = cfg.p as usize - 1;
    let (mut hi, mut lo, mut q) = (vec![1], vec![1], vec![1]);
    for (j, &rj) in pp.iter().enumerate() {
        let dir = frob_pair(t, ab, j);
        let top = frob_pair(t, ab, cfg.f + j);
        let k = if j == 0 { cfg.r0 - 2 } else { 0 };
        hi = kron_vec(t, &nabla_eval_row(t, rj, k, dir, top), &hi);
        lo = kron_vec(t, &nabla_eval_row(t, rj, k, dir, dir), &lo);
        q = kron_vec(t, &nabla_eval_row(t, qdeg, 0, dir, top), &q);
    }
    let prow = hi.iter().zip(&lo).map(|(&x, &y)| t.sub(x, y)).collect();
    (prow, q)
}

fn row_matrix(v: Vec<Fe>) -> Matrix {
    Matrix { rows: 1, cols: v.len(), data: v }
}

/// The 1 × dim evaluation row of ψ at g in domain coordinates (P fastest).
pub fn cusp_eval(t: &Tower, cfg: &CuspConfig, g: &GroupElem) -> Matrix {
    let (pr, qr) = cusp_rows(t, cfg, g);
    row_matrix(kron_vec(t, &qr, &pr))
}

/// ψ_{P⊗Q}(g) computed from the polynomials themselves.
pub fn psi_cusp_value(t: &Tower, cfg: &CuspConfig, pp: &MultiPoly, qq: &MultiPoly, g: &GroupElem) -> Result<Fe> {
    for (poly, want) in [(pp, cfg.p_profile()), (qq, cfg.q_profile())] {
        if poly.profile() != want.as_slice() {
            return Err(Error::ProfileMismatch { expected: want, got: poly.profile().to_vec() });
        }
    }
    let ab = torus_coords(t, g)?;
    let top: Vec<(Fe, Fe)> = (0..cfg.f).map(|j| frob_pair(t, ab, cfg.f + j)).collect();
    let bottom: Vec<(Fe, Fe)> = (0..cfg.f).map(|j| frob_pair(t, ab, j)).collect();
    let d = NablaOp::twisted(0, ab.0, ab.1).apply(t, cfg.r0 - 2, pp)?;
    Ok(t.mul(d.eval_diff(t, &bottom, &top)?, qq.evaluate(t, &top)?))
}

fn psi_on_reps(t: &Tower, grp: &Group, cfg: &CuspConfig, pp: &MultiPoly, qq: &MultiPoly) -> Result<Vec<Fe>> {
    cfg.validate()?;
    grp.torus_coset_reps()?.iter().map(|g| psi_cusp_value(t, cfg, pp, qq, g)).collect()
}

/// ψ_{P⊗Q} for f = 1 on the torus coset representatives.
pub fn psi_cusp(t: &Tower, grp: &Group, cfg: &CuspConfig, pp: &MultiPoly, qq: &MultiPoly) -> Result<Vec<Fe>> {
    if cfg.f != 1 {
        return Err(Error::RangeError("psi_cusp is the f = 1 map".into()));
    }
    psi_on_reps(t, grp, cfg, pp, qq)
}

/// ψ_{P⊗Q} for any f on the torus coset representatives.
pub fn psi_cusp_twisted(t: &Tower, grp: &Group, cfg: &CuspConfig, pp: &MultiPoly, qq: &MultiPoly) -> Result<Vec<Fe>> {
    psi_on_reps(t, grp, cfg, pp, qq)
}

/// Where the Q-factor of the r = 1 map V_p ⊗ V_{p−1} → ind ω is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum R1Point {
    /// Q(A, B): the map lands in ind_T^G ω.
    Plain,
    /// Q(A^p, B^p): the map lands in ind_T^G ω^{3−2p} instead.
    Frobenius,
}

/// Exponent of the target character of the r = 1 map, reduced mod p² − 1.
pub fn r1_exponent(p: u64, at: R1Point) -> u64 {
    match at {
        R1Point::Plain => 1,
        R1Point::Frobenius => p * p - 2 * p + 2,
    }
}

fn r1_rows(t: &Tower, g: &GroupElem, at: R1Point) -> (Vec<Fe>, Vec<Fe>) {
    let p = t.p() as usize;
    let ab = torus_coords(t, g).expect("odd characteristic");
    let (x, y) = frob_pair(t, ab, 1);
    // D(X^{p−i}Y^i) = (p−i)X^{2p−1−i}Y^i + iX^{p−i}Y^{i+p−1}, evaluated at (A^p, B^p)
    let prow = (0..=p)
        .map(|i| {
            let u = t.mul(t.from_int((p - i) as i64), t.mul(t.pow(x, (2 * p - 1 - i) as u64), t.pow(y, i as u64)));
            let v = t.mul(t.from_int(i as i64), t.mul(t.pow(x, (p - i) as u64), t.pow(y, (i + p - 1) as u64)));
            t.add(u, v)
        })
        .collect();
    let qpt = match at {
        R1Point::Plain => ab,
        R1Point::Frobenius => (x, y),
    };
    (prow, nabla_eval_row(t, p - 1, 0, qpt, qpt))
}

/// Evaluation row of the r = 1 map at g.
pub fn r1_eval(t: &Tower, g: &GroupElem, at: R1Point) -> Matrix {
    let (pr, qr) = r1_rows(t, g, at);
    row_matrix(kron_vec(t, &qr, &pr))
}

/// The r = 1 map on the torus coset representatives.
pub fn psi_cusp_r1(t: &Tower, grp: &Group, pp: &MultiPoly, qq: &MultiPoly) -> Result<Vec<Fe>> {
    let p = t.p() as usize;
    if pp.profile() != [p] || qq.profile() != [p - 1] {
        return Err(Error::ProfileMismatch { expected: vec![p, p - 1], got: [pp.profile(), qq.profile()].concat() });
    }
    let coords = kron_vec(t, qq.coeffs(), pp.coeffs());
    Ok(grp.torus_coset_reps()?.iter().map(|g| r1_eval(t, g, R1Point::Plain).mul_vec(t, &coords)[0]).collect())
}

/// The span ⟨D_0, …, D_{f−1}⟩ inside ⊗_j V_{R_j}^{Fr^j}, with each operator's image.
#[derive(Clone, Debug)]
pub struct DSpan {
    pub profile: Profile,
    pub span: Subspace,
    pub images: Vec<Subspace>,
}

pub fn build_dspan(t: &Tower, cfg: &CuspConfig) -> Result<DSpan> {
    let p = cfg.p as usize;
    let target = cfg.p_profile();
    let n = profile_dim(&target);
    let mut images = Vec::with_capacity(cfg.f);
    for j in 0..cfg.f {
        let dom = dj_domain(p, cfg.f, cfg.r0, j);
        let mut vecs = Vec::new();
        for idx in 0..profile_dim(&dom) {
            let img = serre_apply(t, SerreOp::Twisted(j), &MultiPoly::basis(&dom, idx))?;
            if img.profile() != target.as_slice() {
                return Err(Error::ProfileMismatch { expected: target.clone(), got: img.profile().to_vec() });
            }
            vecs.push(img.into_coeffs());
        }
        images.push(Subspace::from_vectors(t, n, &vecs));
    }
    let mut span = Subspace::zero(n);
    for im in &images {
        span = span.sum(t, im);
    }
    Ok(DSpan { profile: target, span, images })
}

/// Membership in ⟨D_0, …, D_{f−1}⟩ through linear conditions on the
/// coefficients b_{i_0, …, i_{f−1}} (indexed by Y-exponents).
pub fn dj_membership(t: &Tower, cfg: &CuspConfig, poly: &MultiPoly) -> bool {
    let (p, f, r0) = (cfg.p as usize, cfg.f, cfg.r0);
    let b = |e: &[usize]| poly.coeff(e);
    let with_head = |i0: usize, rest: &[usize]| -> Vec<usize> {
        let mut e = vec![i0];
        e.extend_from_slice(rest);
        e
    };
    // (1) i_0 b_{i_0,0,…,0} = (r_0 − i_0) b_{i_0+p−1,p−1,…,p−1}
    for i0 in 1..r0 {
        let lhs = t.mul(t.from_int(i0 as i64), b(&with_head(i0, &vec![0; f - 1])));
        let rhs = t.mul(t.from_int((r0 - i0) as i64), b(&with_head(i0 + p - 1, &vec![p - 1; f - 1])));
        if lhs != rhs {
            return false;
        }
    }
    let tails = profile_dim(&vec![p - 1; f - 1]);
    // (2) b vanishes for r_0 ≤ i_0 ≤ p − 1
    for i0 in r0..p {
        for k in 0..tails {
            if b(&with_head(i0, &decode(&vec![p - 1; f - 1], k))) != 0 {
                return false;
            }
        }
    }
    // (3) b_{i_0,0,…,0,i_t,…} = −b_{i_0+p,p−1,…,p−1,i_t−1,…} for i_t ≥ 1
    for i0 in 0..r0 {
        for k in 0..tails {
            let rest = decode(&vec![p - 1; f - 1], k);
            let Some(tpos) = rest.iter().position(|&x| x != 0) else { continue };
            let lhs = with_head(i0, &rest);
            let mut rest2 = rest.clone();
            for x in rest2.iter_mut().take(tpos) {
                *x = p - 1;
            }
            rest2[tpos] -= 1;
            let rhs = with_head(i0 + p, &rest2);
            if b(&lhs) != t.neg(b(&rhs)) {
                return false;
            }
        }
    }
    true
}

/// ψ_{P⊗Q} of a basis monomial as Σ c A^a B^b before any reduction.
fn raw_terms(t: &Tower, cfg: &CuspConfig, ip: usize, iq: usize) -> Vec<(u64, u64, Fe)> {
    let p = cfg.p;
    let pp = cfg.p_profile();
    let ep = decode(&pp, ip);
    let eq = decode(&cfg.q_profile(), iq);
    let pw = |k: usize| p.pow(k as u32);
    let slot_terms = |j: usize, s: usize| -> Vec<(u64, u64, Fe)> {
        let (r, i) = (pp[j], ep[j]);
        let k = if j == 0 { cfg.r0 - 2 } else { 0 };
        let mut out = Vec::new();
        for l in 0..=k.min(i) {
            if k - l > r - i {
                continue;
            }
            let c = t.mul(
                binom_mod(k as u64, l as u64, t.p()),
                t.mul(falling((r - i) as i64, (k - l) as i64, t.p()), falling(i as i64, l as i64, t.p())),
            );
            if c == 0 {
                continue;
            }
            let a = pw(j) * (k - l) as u64 + pw(s) * (r - i - (k - l)) as u64;
            let b = pw(j) * l as u64 + pw(s) * (i - l) as u64;
            out.push((a, b, c));
        }
        out
    };
    let product = |shift: usize| -> Vec<(u64, u64, Fe)> {
        let mut acc = vec![(0u64, 0u64, 1 as Fe)];
        for j in 0..cfg.f {
            let st = slot_terms(j, shift + j);
            acc = acc
                .iter()
                .flat_map(|&(a, b, c)| st.iter().map(move |&(x, y, d)| (a + x, b + y, (c, d))))
                .map(|(a, b, (c, d))| (a, b, t.mul(c, d)))
                .collect();
        }
        acc
    };
    let (qa, qb) = (0..cfg.f).fold((0, 0), |(a, b), j| {
        (a + pw(cfg.f + j) * (p - 1 - eq[j] as u64), b + pw(cfg.f + j) * eq[j] as u64)
    });
    let mut out: Vec<(u64, u64, Fe)> = product(cfg.f).into_iter().map(|(a, b, c)| (a + qa, b + qb, c)).collect();
    out.extend(product(0).into_iter().map(|(a, b, c)| (a + qa, b + qb, t.neg(c))));
    out
}

/// Coordinates in B_q of Σ c A^a B^b, using A^{q²−1} = B^{q²−1} = 1 and then flips and flops.
fn reduce_terms(t: &Tower, e: u64, terms: &[(u64, u64, Fe)]) -> Result<Vec<Fe>> {
    let q = t.q() as u64;
    let (q2, n) = (q * q, (q * q - q) as usize);
    let target = e + q2 - 1;
    let mut out = vec![0; n];
    for &(a, b, c) in terms {
        let tot = a + b;
        if tot < target || (tot - target) % (q2 - 1) != 0 {
            return Err(Error::HypothesisViolated(format!("term A^{a}B^{b} has the wrong degree")));
        }
        let steps = (tot - target) / (q2 - 1);
        let na = steps.min(a / (q2 - 1));
        let b = b - (steps - na) * (q2 - 1);
        for (o, x) in out.iter_mut().zip(flipflop_reduce(t, e, b)?) {
            *o = t.add(*o, t.mul(c, x));
        }
    }
    Ok(out)
}

/// Coordinates of ψ on every basis monomial, by raw expansion plus
/// flip/flop against projection of the values onto B_q.
fn flipflop_agreement(t: &Tower, grp: &Group, cfg: &CuspConfig, mat: &Matrix) -> Result<(bool, bool)> {
    let q = t.q() as u64;
    let e = cfg.r0 as u64;
    let n = (q * q - q) as usize;
    let cols: Vec<Vec<Fe>> = (0..n as u64).map(|i| torus_fi(t, grp, e, i)).collect::<Result<_>>()?;
    let bmat = Matrix::from_cols(&cols, n);
    let Some(binv) = bmat.inverse(t) else { return Ok((false, false)) };
    let dp = profile_dim(&cfg.p_profile());
    let results: Vec<Result<bool>> = (0..mat.cols)
        .into_par_iter()
        .map(|v| {
            let raw = reduce_terms(t, e, &raw_terms(t, cfg, v % dp, v / dp))?;
            Ok(raw == binv.mul_vec(t, &mat.col(v)))
        })
        .collect();
    let mut ok = true;
    for r in results {
        ok &= r?;
    }
    Ok((true, ok))
}

/// span ⊗ (everything) inside a tensor product with `outer` fiber coordinates.
fn tensor_full(t: &Tower, sub: &Subspace, outer: usize) -> Subspace {
    let n = sub.ambient();
    let mut vecs = Vec::with_capacity(sub.dim() * outer);
    for k in 0..outer {
        for b in sub.basis() {
            let mut v = vec![0; n * outer];
            v[k * n..(k + 1) * n].copy_from_slice(b);
            vecs.push(v);
        }
    }
    Subspace::from_vectors(t, n * outer, &vecs)
}

fn record_cert(t: &Tower, grp: &Group, pres: &Presentation, rep: &mut Report) -> Result<()> {
    let cert = pres.certify(t, grp)?;
    rep.check("equivariance.g_linear", cert.g_linear, "ψ(g) = ψ(1)ρ(g) for every g");
    rep.check("equivariance.h_linear", cert.h_linear, "ψ(hg) = σ(h)ψ(g) for every h in T");
    rep.check("equivariance.homomorphism", cert.homomorphism, "ρ(gs) = ρ(g)ρ(s) on generators");
    let sample = literal_sample(t, grp);
    let lit = pres.literal_check(t, grp, &sample)?;
    rep.check("equivariance.literal", lit, format!("ψ(g·v) = g·ψ(v) on {} elements", sample.len()));
    Ok(())
}

/// Certify a cuspidal map: the D-span and its coefficient description, the
/// D_j defects (f ≥ 2), equivariance, two routes to the values, the kernel and the rank.
pub fn verify_cusp(cfg: &CuspConfig) -> Result<Report> {
    cfg.validate()?;
    let name = if cfg.f == 1 { "cuspidal" } else { "cuspidal-twisted" };
    let mut rep = Report::new(name);
    rep.param("p", cfg.p).param("f", cfg.f).param("r0", cfg.r0);
    let t = Tower::new(cfg.p, cfg.f)?;
    let grp = Group::new(&t)?;
    let q = t.q() as usize;
    let domain = cfg.domain();
    let space = InducedSpace::new(&t, &grp, cfg.datum())?;
    let pprof = cfg.p_profile();
    let dp = profile_dim(&pprof);
    let dq = profile_dim(&cfg.q_profile());

    let ds = build_dspan(&t, cfg)?;
    rep.check(
        "dspan.dim",
        ds.span.dim() == cfg.span_dim(),
        format!("{} (expected r_0 p^(f-1) + 1 = {})", ds.span.dim(), cfg.span_dim()),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(0xd5);
    let mut agree = ds.span.basis().iter().all(|v| dj_membership(&t, cfg, &MultiPoly::from_coeffs(&pprof, v.clone()).unwrap()));
    let top = t.elements(Level::Top);
    let mut members = 0;
    for k in 0..200 {
        let v: Vec<Fe> = if k % 2 == 0 {
            let mut acc = vec![0; dp];
            for b in ds.span.basis() {
                let c = top[rng.gen_range(0..top.len())];
                for (a, x) in acc.iter_mut().zip(b) {
                    *a = t.add(*a, t.mul(c, *x));
                }
            }
            // perturb one coordinate every other time
            if k % 4 == 2 {
                let i = rng.gen_range(0..dp);
                acc[i] = t.add(acc[i], 1);
            }
            acc
        } else {
            (0..dp).map(|_| top[rng.gen_range(0..top.len())]).collect()
        };
        let inside = ds.span.contains(&t, &v);
        members += inside as usize;
        agree &= inside == dj_membership(&t, cfg, &MultiPoly::from_coeffs(&pprof, v).unwrap());
    }
    rep.check("dspan.membership", agree, format!("coefficient conditions agree with the span on its basis and 200 samples ({members} members)"));

    if cfg.f >= 2 {
        let p = cfg.p as usize;
        let mut ok = true;
        for j in 0..cfg.f {
            let allowed = (if j == 0 { 1..cfg.f } else { 1..j })
                .fold(Subspace::zero(dp), |acc, l| acc.sum(&t, &ds.images[l]));
            let dom = dj_domain(p, cfg.f, cfg.r0, j);
            let monos: Vec<MultiPoly> = (0..profile_dim(&dom)).map(|i| MultiPoly::basis(&dom, i)).collect();
            ok &= grp.elements().par_iter().all(|g| {
                monos.iter().all(|m| match dj_equivariance_defect(&t, j, g, m) {
                    Ok(d) => allowed.contains(&t, d.coeffs()),
                    Err(_) => false,
                })
            });
        }
        rep.check("dj_defects", ok, "D_j(g·P) − g·D_j(P) lies in the span of the later operators' images");
    }

    let quotient = dp - ds.span.dim();
    rep.check("quotient", quotient == q - 1, format!("{quotient} (expected q - 1 = {})", q - 1));

    let pres = Presentation { domain: &domain, space: &space, at: Box::new(|g: &GroupElem| cusp_eval(&t, cfg, g)) };
    record_cert(&t, &grp, &pres, &mut rep)?;
    let mat = pres.matrix();
    let mut agree = true;
    for _ in 0..4 {
        let pp = random_poly(&t, &pprof, &mut rng);
        let qq = random_poly(&t, &cfg.q_profile(), &mut rng);
        let v = kron_vec(&t, qq.coeffs(), pp.coeffs());
        agree &= psi_cusp_twisted(&t, &grp, cfg, &pp, &qq)? == mat.mul_vec(&t, &v);
    }
    rep.check("dual_route", agree, "monomial-row matrix agrees with literal ∇ evaluation on 4 random P⊗Q");
    let (basis_ok, ff) = flipflop_agreement(&t, &grp, cfg, &mat)?;
    rep.check("flipflop.basis", basis_ok, "f_0, …, f_{q²−q−1} are a basis of the induced space");
    rep.check("flipflop.agreement", ff, "raw A^aB^b expansion reduced by flips and flops equals projection onto B_q");

    let kernel = mat.kernel(&t);
    let expected = tensor_full(&t, &ds.span, dq);
    let rank = mat.rank(&t);
    rep.check("kernel_equals_span", kernel.dim() == expected.dim() && kernel.contains_all(&t, &expected), format!("kernel {} vs span ⊗ Q {}", kernel.dim(), expected.dim()));
    rep.check("rank", rank == q * (q - 1), format!("{rank} (expected q(q-1) = {})", q * (q - 1)));
    rep.check("surjective", rank == space.dim(), format!("{rank} of {}", space.dim()));
    rep.dim("domain", domain.dim()).dim("dspan", ds.span.dim()).dim("quotient", quotient * dq);
    rep.dim("kernel", kernel.dim()).dim("rank", rank).dim("induced", space.dim());
    rep.dim("lhs", domain.dim() - kernel.dim()).dim("rhs", space.dim());
    Ok(rep.finish())
}

/// f = 1 with parameter r.
pub fn verify_cuspidal(p: u64, r: usize) -> Result<Report> {
    verify_cusp(&CuspConfig::base(p, r)?)
}

pub fn verify_cuspidal_twisted(p: u64, f: usize, r0: usize) -> Result<Report> {
    verify_cusp(&CuspConfig::twisted(p, f, r0)?)
}

/// Certify the r = 1 map V_p ⊗ V_{p−1} → ind ω, and that evaluating Q at
/// (A^p, B^p) instead lands in ind ω^{3−2p}.
pub fn verify_r1(p: u64) -> Result<Report> {
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let mut rep = Report::new("cuspidal-r1");
    rep.param("p", p);
    let t = Tower::new(p, 1)?;
    let grp = Group::new(&t)?;
    let pu = p as usize;
    let domain = SymRep::twisted(&[pu]).tensor(&SymRep::twisted(&[pu - 1]));
    let space = InducedSpace::new(&t, &grp, Datum::Torus { m: 0, e: 1 })?;
    let pres = Presentation { domain: &domain, space: &space, at: Box::new(|g: &GroupElem| r1_eval(&t, g, R1Point::Plain)) };
    record_cert(&t, &grp, &pres, &mut rep)?;
    let mat = pres.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(0x71);
    let mut agree = true;
    for _ in 0..4 {
        let pp = random_poly(&t, &[pu], &mut rng);
        let qq = random_poly(&t, &[pu - 1], &mut rng);
        let direct: Vec<Fe> = grp
            .torus_coset_reps()?
            .iter()
            .map(|g| {
                let ab = torus_coords(&t, g)?;
                let hi = vec![frob_pair(&t, ab, 1)];
                let dp = serre_apply(&t, SerreOp::Classical, &pp)?;
                Ok(t.mul(dp.evaluate(&t, &hi)?, qq.evaluate(&t, &[ab])?))
            })
            .collect::<Result<_>>()?;
        agree &= direct == psi_cusp_r1(&t, &grp, &pp, &qq)?;
        agree &= direct == mat.mul_vec(&t, &kron_vec(&t, qq.coeffs(), pp.coeffs()));
    }
    rep.check("dual_route", agree, "row matrix agrees with D(P)(A^p,B^p)·Q(A,B) on 4 random P⊗Q");
    let mut xy = Subspace::zero(pu + 1);
    xy.insert(&t, &MultiPoly::basis(&[pu], 0).into_coeffs());
    xy.insert(&t, &MultiPoly::basis(&[pu], pu).into_coeffs());
    let expected = tensor_full(&t, &xy, pu);
    let kernel = mat.kernel(&t);
    let rank = mat.rank(&t);
    rep.check("kernel_equals_span", kernel.dim() == expected.dim() && kernel.contains_all(&t, &expected), format!("kernel {} vs span(X^p, Y^p) ⊗ V_(p-1) {}", kernel.dim(), expected.dim()));
    rep.check("rank", rank == pu * (pu - 1), format!("{rank} (expected {})", pu * (pu - 1)));
    rep.check("surjective", rank == space.dim(), format!("{rank} of {}", space.dim()));
    // The variant with Q at (A^p, B^p) is T-linear for the other exponent only.
    let alt = |e: u64| -> Result<bool> {
        let sp = InducedSpace::new(&t, &grp, Datum::Torus { m: 0, e })?;
        let pr = Presentation { domain: &domain, space: &sp, at: Box::new(|g: &GroupElem| r1_eval(&t, g, R1Point::Frobenius)) };
        Ok(pr.certify(&t, &grp)?.h_linear)
    };
    let e_alt = r1_exponent(p, R1Point::Frobenius);
    let (wrong, right) = (alt(1)?, alt(e_alt)?);
    rep.check("frobenius_point_exponent", !wrong && right, format!("Q at (A^p,B^p) is T-linear for ω^{e_alt}, not for ω"));
    rep.dim("domain", domain.dim()).dim("kernel", kernel.dim()).dim("rank", rank).dim("induced", space.dim());
    Ok(rep.finish())
}

/// Matrix of D: V_d → V_{d+p−1} (f = 1).
fn d_matrix(t: &Tower, d: usize) -> Result<Matrix> {
    let cols: Vec<Vec<Fe>> = (0..=d)
        .map(|i| Ok(serre_apply(t, SerreOp::Classical, &MultiPoly::basis(&[d], i))?.into_coeffs()))
        .collect::<Result<_>>()?;
    Ok(Matrix::from_cols(&cols, d + t.p() as usize))
}

/// Matrix of multiplication by θ^k: V_d → V_{d+k(p+1)}.
fn theta_matrix(t: &Tower, d: usize, k: usize) -> Result<Matrix> {
    let th = dickson(t).pow(t, k);
    let n = d + k * (t.p() as usize + 1);
    let cols: Vec<Vec<Fe>> =
        (0..=d).map(|i| Ok(MultiPoly::basis(&[d], i).multiply(t, &th)?.into_coeffs())).collect::<Result<_>>()?;
    Ok(Matrix::from_cols(&cols, n + 1))
}

fn lift_matrix(sub: &Subspace) -> Matrix {
    let n = sub.ambient() - sub.dim();
    let cols: Vec<Vec<Fe>> = (0..n)
        .map(|k| {
            let mut e = vec![0; n];
            e[k] = 1;
            sub.lift(&e)
        })
        .collect();
    Matrix::from_cols(&cols, sub.ambient())
}

fn proj_matrix(t: &Tower, sub: &Subspace) -> Matrix {
    let n = sub.ambient();
    let cols: Vec<Vec<Fe>> = (0..n)
        .map(|k| {
            let mut e = vec![0; n];
            e[k] = 1;
            sub.quotient_coords(t, &e)
        })
        .collect();
    Matrix::from_cols(&cols, n - sub.dim())
}

/// A generator of F_{q²}^*.
fn torus_generator(t: &Tower) -> Fe {
    let n = t.q2() as u64 - 1;
    t.elements(Level::Top)
        .into_iter()
        .find(|&x| x != 0 && (1..n).all(|k| n % k != 0 || t.pow(x, k) != 1))
        .expect("cyclic")
}

/// Frobenius reciprocity: a T-map Λ: V → σ vanishing on W induces the
/// G-map v ↦ (g ↦ Λ(g·v)) from V/W to ind_T^G σ. Random Λ are tried until
/// the induced map has kernel exactly W and fills the induced space.
/// Returns the best rank reached and, on success, Λ with the stacked matrix.
pub fn frobenius_iso(
    t: &Tower,
    grp: &Group,
    domain: &SymRep,
    w: &Subspace,
    space: &InducedSpace,
    seed: u64,
) -> Result<(usize, Option<(Matrix, Matrix)>)> {
    let x0 = torus_generator(t);
    let t0 = torus_embed(t, x0)?;
    let sig = space
        .subgroup(t, grp)?
        .into_iter()
        .find(|(h, _)| *h == t0)
        .map(|(_, s)| s)
        .ok_or_else(|| Error::HypothesisViolated("torus generator missing".into()))?;
    let n = domain.dim();
    let k = space.fiber_dim();
    let mut sys = intertwiner_system(t, &[domain.matrix(t, &t0)], &[sig]);
    let mut extra = Vec::new();
    for v in w.basis() {
        for i in 0..k {
            let mut row = vec![0; k * n];
            row[i * n..(i + 1) * n].copy_from_slice(v);
            extra.push(row);
        }
    }
    if !extra.is_empty() {
        sys = Matrix::vstack(&[sys, Matrix::from_rows(&extra, k * n)]);
    }
    let sols = sys.kernel(t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = t.elements(Level::Top);
    let mut best = 0;
    if sols.dim() == 0 {
        return Ok((0, None));
    }
    let reps_mats: Vec<Matrix> = space.reps().iter().map(|g| domain.matrix(t, g)).collect();
    for _ in 0..16 {
        let mut lam = vec![0; k * n];
        for b in sols.basis() {
            let c = top[rng.gen_range(0..top.len())];
            for (a, x) in lam.iter_mut().zip(b) {
                *a = t.add(*a, t.mul(c, *x));
            }
        }
        let lam = Matrix { rows: k, cols: n, data: lam };
        let blocks: Vec<Matrix> = reps_mats.iter().map(|r| lam.mul(t, r)).collect();
        let phi = Matrix::vstack(&blocks);
        let rank = phi.rank(t);
        best = best.max(rank);
        if rank == space.dim() && rank + w.dim() == n {
            return Ok((rank, Some((lam, phi))));
        }
    }
    Ok((best, None))
}

fn base_report(p: u64, r: i64) -> Result<Report> {
    if r < 0 {
        verify_r1(p)
    } else {
        verify_cuspidal(p, r as usize)
    }
}

fn base_rows(t: &Tower, p: u64, r: i64, g: &GroupElem) -> (Vec<Fe>, Vec<Fe>) {
    if r < 0 {
        r1_rows(t, g, R1Point::Plain)
    } else {
        cusp_rows(t, &CuspConfig { p, f: 1, r0: r as usize + 2 }, g)
    }
}

/// V_{r+(k+1)(p+1)}/D(V_{r+2+k(p+1)}) ⊗ V_{p−1} ≅ ind_T^G ω^{r+2+k(p+1)}
/// for −1 ≤ r ≤ p − 3 − k, 0 ≤ k ≤ p − 2, through multiplication by θ^k.
pub fn verify_bigger_range(p: u64, r: i64, k: usize) -> Result<Report> {
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let pi = p as i64;
    if k as i64 > pi - 2 || r < -1 || r > pi - 3 - k as i64 {
        return Err(Error::RangeError(format!("need 0 <= k <= p-2 and -1 <= r <= p-3-k, got r = {r}, k = {k}")));
    }
    let mut rep = Report::new("bigger-range");
    rep.param("p", p).param("r", r).param("k", k);
    let t = Tower::new(p, 1)?;
    let grp = Group::new(&t)?;
    let pu = p as usize;
    let small = (r + 2) as usize;
    let base = small + pu - 1;
    let big_m = small + k * (pu + 1);
    let big_n = base + k * (pu + 1);
    rep.absorb("base", base_report(p, r)?);

    let d_small = d_matrix(&t, small)?;
    let d_m = d_matrix(&t, big_m)?;
    let th_base = theta_matrix(&t, base, k)?;
    let th_small = theta_matrix(&t, small, k)?;
    rep.check("d_injective", d_m.rank(&t) == big_m + 1, format!("D on V_{big_m}"));
    rep.check("theta_commutes_with_d", th_base.mul(&t, &d_small) == d_m.mul(&t, &th_small), "θ^k D(Q) = D(θ^k Q)");
    rep.check("d_theta_zero", serre_apply(&t, SerreOp::Classical, &dickson(&t))?.is_zero(), "D(θ) = 0");
    let wk = th_base.image(&t);
    let wk_ok = k == 0 || {
        let id = ideal_component(&t, &[big_n], &[k]);
        id.span().dim() == wk.dim() && id.span().contains_all(&t, &wk)
    };
    rep.check("theta_image", wk_ok, format!("θ^k V_{base} is the degree-{big_n} part of (θ^k)"));
    let im_m = d_m.image(&t);
    let dk = d_m.mul(&t, &th_small).image(&t);
    let meet = wk.intersect(&t, &im_m);
    rep.check("kernel_identity", meet.dim() == dk.dim() && meet.contains_all(&t, &dk), "θ^k V ∩ D(V) = D(θ^k V)");
    let base_sub = d_small.image(&t);
    let dims_ok = wk.dim() - dk.dim() == pu - 1 && base + 1 - base_sub.dim() == pu - 1 && big_n + 1 - im_m.dim() == pu - 1;
    rep.check("dims", dims_ok, format!("all three quotients have dimension p - 1 = {}", pu - 1));
    let well = base_sub.basis().iter().all(|v| im_m.contains(&t, &th_base.mul_vec(&t, v)));
    rep.check("well_defined", well, "θ^k D(V_(r+2)) ⊂ D(V_M)");
    let lift = lift_matrix(&base_sub);
    let proj = proj_matrix(&t, &im_m);
    let s = proj.mul(&t, &th_base).mul(&t, &lift);
    let s_inv = s.inverse(&t);
    rep.check("composite_bijective", s_inv.is_some(), "V_R/D(V_(r+2)) → V_N/D(V_M) induced by θ^k");
    let src = SymRep::twisted(&[base]).with_det(k as u64);
    let dst = SymRep::twisted(&[big_n]);
    let eq = grp.elements().par_iter().all(|g| th_base.mul(&t, &src.matrix(&t, g)) == dst.matrix(&t, g).mul(&t, &th_base));
    rep.check("theta_equivariant", eq, "θ^k: V_R ⊗ det^k → V_N is G-linear");
    let Some(s_inv) = s_inv else { return Ok(rep.finish()) };

    let fmat = lift.mul(&t, &s_inv).mul(&t, &proj);
    let domain = SymRep::twisted(&[big_n]).tensor(&SymRep::twisted(&[pu - 1]));
    let e = (r + 2) as u64 + (k * (pu + 1)) as u64;
    let space = InducedSpace::new(&t, &grp, Datum::Torus { m: 0, e })?;
    let at = |g: &GroupElem| -> Matrix {
        let (pr, qr) = base_rows(&t, p, r, g);
        let pr = row_matrix(pr).mul(&t, &fmat);
        let s = t.pow(g.det(&t), k as u64);
        row_matrix(kron_vec(&t, &qr, &pr.data)).scale(&t, s)
    };
    let pres = Presentation { domain: &domain, space: &space, at: Box::new(at) };
    record_cert(&t, &grp, &pres, &mut rep)?;
    let mat = pres.matrix();
    let kernel = mat.kernel(&t);
    let expected = tensor_full(&t, &im_m, pu);
    let rank = mat.rank(&t);
    rep.check("kernel_equals_d_image", kernel.dim() == expected.dim() && kernel.contains_all(&t, &expected), format!("kernel {} vs D(V_M) ⊗ V_(p-1) {}", kernel.dim(), expected.dim()));
    rep.check("rank", rank == pu * (pu - 1) && rank == space.dim(), format!("{rank} of {}", space.dim()));
    let (r2, found) = frobenius_iso(&t, &grp, &domain, &expected, &space, 0xb16)?;
    rep.check("second_route", found.is_some(), format!("Frobenius reciprocity map of rank {r2} found independently"));
    rep.dim("domain", domain.dim()).dim("quotient", (big_n + 1 - im_m.dim()) * pu);
    rep.dim("kernel", kernel.dim()).dim("rank", rank).dim("induced", space.dim());
    Ok(rep.finish())
}

/// V_{r+2+(m+1)(p−1)}/D^{m+1}(V_{r+2}) ⊗ V_{p−1} ≅ ind_T^G(V_m ⊗ ω^{r+2−m})
/// ≅ ⊕_{j≤m} ind_T^G ω^{r+2+j(p−1)} for 2m − 1 ≤ r ≤ p − 3.
pub fn verify_higher_m(p: u64, r: i64, m: usize) -> Result<Report> {
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let pi = p as i64;
    if r < 2 * m as i64 - 1 || r > pi - 3 {
        return Err(Error::RangeError(format!("need 2m-1 <= r <= p-3, got r = {r}, m = {m}")));
    }
    let mut rep = Report::new("higher-m");
    rep.param("p", p).param("r", r).param("m", m);
    let t = Tower::new(p, 1)?;
    let grp = Group::new(&t)?;
    let pu = p as usize;
    let small = (r + 2) as usize;
    let lower = small + m * (pu - 1);
    let big_l = lower + pu - 1;

    let kvecs: Vec<Vec<Fe>> = (0..=small)
        .map(|i| Ok(serre_power(&t, SerreOp::Classical, m + 1, &MultiPoly::basis(&[small], i))?.into_coeffs()))
        .collect::<Result<_>>()?;
    let kk = Subspace::from_vectors(&t, big_l + 1, &kvecs);
    rep.check("d_power_injective", kk.dim() == small + 1, format!("dim D^(m+1)(V_{small}) = {}", kk.dim()));
    let d_lower = d_matrix(&t, lower)?;
    rep.check("d_injective", d_lower.rank(&t) == lower + 1, format!("D on V_{lower}"));
    let sub = d_lower.image(&t);
    rep.check("filtration", sub.contains_all(&t, &kk), "D^(m+1)(V_(r+2)) ⊂ D(V_lower)");
    let seq_ok = sub.dim() - kk.dim() == m * (pu - 1) && big_l + 1 - sub.dim() == pu - 1;
    rep.check("sequence_dims", seq_ok, format!("sub {} + top {}", sub.dim() - kk.dim(), big_l + 1 - sub.dim()));

    // V_m restricted to T has eigencharacters ω^{m+j(p−1)}, j = 0..m, each once.
    let x0 = torus_generator(&t);
    let rho = slot_matrix(&t, &torus_embed(&t, x0)?, m);
    let eig_ok = (0..=m).all(|j| {
        let lam = t.pow(x0, (m + j * (pu - 1)) as u64);
        let shifted = rho.sub(&t, &Matrix::identity(m + 1).scale(&t, lam));
        shifted.kernel(&t).dim() == 1
    });
    rep.check("torus_restriction", eig_ok, format!("V_{m}|_T splits into ω^(m+j(p-1)), j = 0..{m}"));

    if m == 0 {
        rep.absorb("base", base_report(p, r)?);
    } else {
        rep.absorb("top", verify_bigger_range(p, r - 2 * m as i64, m)?);
        rep.absorb("sub", verify_higher_m(p, r, m - 1)?);
    }

    let domain = SymRep::twisted(&[big_l]).tensor(&SymRep::twisted(&[pu - 1]));
    let space = InducedSpace::new(&t, &grp, Datum::Torus { m, e: (r + 2) as u64 - m as u64 })?;
    let w = tensor_full(&t, &kk, pu);
    let (rank, found) = frobenius_iso(&t, &grp, &domain, &w, &space, 0x4e)?;
    rep.check("isomorphism", found.is_some(), format!("Frobenius reciprocity map of rank {rank} onto {}", space.dim()));
    if let Some((lam, _)) = found {
        let dom = domain.clone();
        let tt = &t;
        let pres = Presentation { domain: &domain, space: &space, at: Box::new(move |g: &GroupElem| lam.mul(tt, &dom.matrix(tt, g))) };
        let cert = pres.certify(&t, &grp)?;
        rep.check("isomorphism.equivariant", cert.pass(), "induced map is G-linear");
        let kernel = pres.matrix().kernel(&t);
        rep.check("isomorphism.kernel", kernel.dim() == w.dim() && kernel.contains_all(&t, &w), "kernel is D^(m+1)(V_(r+2)) ⊗ V_(p-1)");
    }
    for j in 0..=m {
        rep.dim(&format!("summand_{j}.exponent"), small + j * (pu - 1));
    }
    rep.dim("domain", domain.dim()).dim("quotient", (big_l + 1 - kk.dim()) * pu).dim("rank", rank).dim("induced", space.dim());
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_pass(r: &Report) {
        assert!(r.pass(), "{}", r.render());
    }

    #[test]
    fn config_guards() {
        assert!(CuspConfig::base(5, 2).is_ok());
        assert!(matches!(CuspConfig::base(5, 3), Err(Error::RangeError(_))));
        assert!(matches!(CuspConfig::twisted(3, 2, 1), Err(Error::RangeError(_))));
        assert!(matches!(CuspConfig::twisted(2, 1, 2), Err(Error::EvenCharacteristic)));
        assert_eq!(CuspConfig::twisted(3, 2, 2).unwrap().span_dim(), 7);
        assert!(matches!(verify_bigger_range(5, 1, 2), Err(Error::RangeError(_))));
        assert!(matches!(verify_higher_m(5, 0, 1), Err(Error::RangeError(_))));
    }

    #[test]
    fn base_p5_r1() {
        let r = verify_cuspidal(5, 1).unwrap();
        assert_pass(&r);
        assert_eq!(r.dims["rank"], 20);
        assert_eq!(r.dims["kernel"], r.dims["domain"] - 20);
    }

    #[test]
    fn d_image_is_killed() {
        let t = Tower::new(5, 1).unwrap();
        let grp = Group::new(&t).unwrap();
        let cfg = CuspConfig::base(5, 1).unwrap();
        let dr = serre_apply(&t, SerreOp::Classical, &MultiPoly::parse(&t, "X0^2*Y0+2*Y0^3", 1).unwrap()).unwrap();
        let qq = MultiPoly::parse(&t, "X0^3*Y0+Y0^4", 1).unwrap();
        assert!(psi_cusp(&t, &grp, &cfg, &dr, &qq).unwrap().iter().all(|&x| x == 0));
    }

    #[test]
    fn r1_map_p5() {
        let r = verify_r1(5).unwrap();
        assert_pass(&r);
        assert_eq!(r.dims["kernel"], 10);
        assert_eq!(r1_exponent(5, R1Point::Frobenius), 17);
    }

    #[test]
    fn membership_conditions_p5_f1() {
        let t = Tower::new(5, 1).unwrap();
        let cfg = CuspConfig::base(5, 2).unwrap();
        let ds = build_dspan(&t, &cfg).unwrap();
        assert_eq!(ds.span.dim(), 5);
        // X^8 = D(X^4)/4 is in the span, X^7 Y is not.
        assert!(dj_membership(&t, &cfg, &MultiPoly::basis(&[8], 0)));
        assert!(!dj_membership(&t, &cfg, &MultiPoly::basis(&[8], 1)));
    }

    #[test]
    fn twisted_p3_f2_r2() {
        let r = verify_cuspidal_twisted(3, 2, 2).unwrap();
        assert_pass(&r);
        assert_eq!(r.dims["dspan"], 7);
        assert_eq!(r.dims["rank"], 72);
        assert_eq!(r.dims["quotient"], 72);
    }

    #[test]
    fn bigger_range_p5_r0_k1() {
        let r = verify_bigger_range(5, 0, 1).unwrap();
        assert_pass(&r);
        assert_eq!(r.dims["rank"], 20);
        assert_eq!(r.dims["quotient"], 20);
    }

    #[test]
    fn bigger_range_boundary_r_minus_one() {
        assert_pass(&verify_bigger_range(5, -1, 0).unwrap());
        assert_pass(&verify_bigger_range(3, -1, 1).unwrap());
    }

    #[test]
    fn higher_m_p5_r1_m1() {
        let r = verify_higher_m(5, 1, 1).unwrap();
        assert_pass(&r);
        assert_eq!(r.dims["induced"], 40);
        assert_eq!(r.dims["quotient"], 40);
    }
}
