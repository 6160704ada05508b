//! Principal series comparison maps.
//!
//! ψ sends P ∈ ⊗_j V_{r_j}^{Fr^j} to the function on G whose value at
//! g = (a b; c d) has component (n_0, …, n_{f−1})
//!
//!   ∏_j C(m_j, n_j)/[r_j]_{m_j−n_j} · (∏_j ∇_j^{m_j−n_j})(P) at (c^{p^j}, d^{p^j})_j
//!
//! with ∇_j = a^{p^j}∂/∂X_j + b^{p^j}∂/∂Y_j. It lands in
//! ind_B^G (⊗_j V_{m_j}^{Fr^j} ⊗ d^e) with e = Σ_j (r_j − m_j)p^j. The split
//! map ψ^ss sends P to g ↦ (∇P(c, d), P(c, d)).
//!
//! Every verifier evaluates the map two ways (a matrix assembled from
//! monomial rows and the literal polynomial computation) and compares.

use crate::diffop::{nabla_eval_row, serre_apply, NablaOp, SerreOp};
use crate::error::{Error, Result};
use crate::gf::{binom_mod, falling, Fe, Tower};
use crate::grp::{Group, GroupElem};
use crate::linalg::{Matrix, Subspace};
use crate::poly::{decode, profile_dim, twisted_point, MultiPoly, Profile};
use crate::rep::{intertwiner_system, intertwiners, quotient_action, Datum, InducedSpace, Presentation, SymRep};
use crate::report::Report;
use crate::theta::{generator_degree, ideal, ideal_component};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Parameters of a principal series comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsConfig {
    pub p: u64,
    /// Slot degrees (r_0, …, r_{f−1}); for f = 1 this is just [r].
    pub r: Profile,
    pub m: Profile,
    /// ψ^ss instead of ψ; requires f = 1, m = 1 and p | r.
    pub split_mode: bool,
}

/// Least r with dim V_r/V_r^{(m+1)} = (m+1)(p+1).
pub fn min_degree(p: u64, m: usize) -> usize {
    (m + 1) * (p as usize + 1) - 1
}

impl PsConfig {
    pub fn new(p: u64, r: &[usize], m: &[usize]) -> PsConfig {
        PsConfig { p, r: r.to_vec(), m: m.to_vec(), split_mode: false }
    }

    pub fn split(p: u64, r: usize) -> PsConfig {
        PsConfig { p, r: vec![r], m: vec![1], split_mode: true }
    }

    pub fn f(&self) -> usize {
        self.r.len()
    }

    /// Check the hypotheses under which ψ is expected to be an isomorphism.
    pub fn validate(&self) -> Result<()> {
        let p = self.p;
        let f = self.f();
        if f == 0 || self.m.len() != f {
            return Err(Error::ProfileMismatch { expected: self.r.clone(), got: self.m.clone() });
        }
        if self.split_mode {
            let r = self.r[0];
            if f != 1 || self.m != [1] {
                return Err(Error::RangeError("the split map needs f = 1 and m = 1".into()));
            }
            if r as u64 % p != 0 {
                return Err(Error::NotDivisible { p, r });
            }
            if r < 2 * (p as usize + 1) {
                return Err(Error::DegreeTooSmall { r, min: 2 * (p as usize + 1) });
            }
            return Ok(());
        }
        for (j, (&r, &m)) in self.r.iter().zip(&self.m).enumerate() {
            if m as u64 > p - 1 || m > r {
                return Err(Error::RangeError(format!("m_{j} = {m} must satisfy m_{j} ≤ min(p−1, r_{j})")));
            }
            if binom_mod(r as u64, m as u64, p as u32) == 0 {
                let hint = if f == 1 && m == 1 && r as u64 % p == 0 {
                    "; p | r, use `verify split`".to_string()
                } else {
                    String::new()
                };
                return Err(Error::BadBinomial { p, r, m, hint });
            }
        }
        if f == 1 {
            let min = min_degree(p, self.m[0]);
            if self.r[0] < min {
                return Err(Error::DegreeTooSmall { r: self.r[0], min });
            }
        } else {
            for (j, &r) in self.r.iter().enumerate() {
                let need = (p as usize).pow((f - j) as u32);
                if r < need {
                    return Err(Error::HypothesisViolated(format!("r_{j} = {r} < p^{} = {need}", f - j)));
                }
            }
        }
        Ok(())
    }

    /// Exponent e of the character d^e in the inducing datum.
    pub fn exponent(&self) -> u64 {
        let p = self.p;
        self.r.iter().zip(&self.m).enumerate().map(|(j, (&r, &m))| (r - m) as u64 * p.pow(j as u32)).sum()
    }

    pub fn datum(&self) -> Datum {
        if self.split_mode {
            Datum::BorelSplit { r: self.r[0] as u64 }
        } else {
            Datum::BorelSym { m: self.m.clone(), e: self.exponent() }
        }
    }

    /// (q+1)∏(m_j+1), which for the split map is 2(p+1).
    pub fn expected_rank(&self) -> usize {
        let q = (self.p as usize).pow(self.f() as u32);
        (q + 1) * self.m.iter().map(|m| m + 1).product::<usize>()
    }
}

/// C(m,n)/[r]_{m−n}.
fn normalizer(t: &Tower, r: usize, m: usize, n: usize) -> Result<Fe> {
    let p = t.p();
    t.div(binom_mod(m as u64, n as u64, p), falling(r as i64, (m - n) as i64, p))
}

/// ψ^j at g as a matrix (m_j+1) × (r_j+1).
fn slot_eval(t: &Tower, r: usize, m: usize, j: usize, g: &GroupElem) -> Matrix {
    let j = j as i64;
    let dir = (t.frobenius(g.a, j), t.frobenius(g.b, j));
    let pt = (t.frobenius(g.c, j), t.frobenius(g.d, j));
    let rows: Vec<Vec<Fe>> = (0..=m)
        .map(|n| {
            let c = normalizer(t, r, m, n).expect("validated: [r]_{m−n} is a unit");
            nabla_eval_row(t, r, m - n, dir, pt).into_iter().map(|x| t.mul(c, x)).collect()
        })
        .collect();
    Matrix::from_rows(&rows, r + 1)
}

/// The fiber-valued evaluation matrix P ↦ ψ_P(g).
pub fn ps_eval(t: &Tower, cfg: &PsConfig, g: &GroupElem) -> Matrix {
    if cfg.split_mode {
        let r = cfg.r[0];
        let rows = vec![nabla_eval_row(t, r, 1, (g.a, g.b), (g.c, g.d)), nabla_eval_row(t, r, 0, (0, 0), (g.c, g.d))];
        return Matrix::from_rows(&rows, r + 1);
    }
    let mut out = Matrix::identity(1);
    for (j, (&r, &m)) in cfg.r.iter().zip(&cfg.m).enumerate() {
        out = slot_eval(t, r, m, j, g).kron(t, &out);
    }
    out
}

/// ψ_P(g) computed literally: apply the twisted ∇_j powers to P and evaluate.
pub fn psi_value(t: &Tower, cfg: &PsConfig, poly: &MultiPoly, g: &GroupElem) -> Result<Vec<Fe>> {
    if poly.profile() != cfg.r.as_slice() {
        return Err(Error::ProfileMismatch { expected: cfg.r.clone(), got: poly.profile().to_vec() });
    }
    let f = cfg.f();
    let pt = twisted_point(t, f, g.c, g.d);
    if cfg.split_mode {
        let d1 = NablaOp::new(0, g.a, g.b).apply(t, 1, poly)?;
        return Ok(vec![d1.evaluate(t, &pt)?, poly.evaluate(t, &pt)?]);
    }
    (0..profile_dim(&cfg.m))
        .map(|idx| {
            let n = decode(&cfg.m, idx);
            let mut q = poly.clone();
            let mut c = 1;
            for j in 0..f {
                q = NablaOp::twisted(j, g.a, g.b).apply(t, cfg.m[j] - n[j], &q)?;
                c = t.mul(c, normalizer(t, cfg.r[j], cfg.m[j], n[j])?);
            }
            Ok(t.mul(c, q.evaluate(t, &pt)?))
        })
        .collect()
}

fn psi_on_reps(t: &Tower, grp: &Group, cfg: &PsConfig, poly: &MultiPoly) -> Result<Vec<Fe>> {
    cfg.validate()?;
    let space = InducedSpace::new(t, grp, cfg.datum())?;
    let mut out = Vec::with_capacity(space.dim());
    for g in space.reps() {
        out.extend(psi_value(t, cfg, poly, g)?);
    }
    Ok(out)
}

/// ψ_P for f = 1, stored on the Borel coset representatives.
pub fn psi_ps(t: &Tower, grp: &Group, cfg: &PsConfig, poly: &MultiPoly) -> Result<Vec<Fe>> {
    if cfg.f() != 1 || cfg.split_mode {
        return Err(Error::RangeError("psi_ps is the f = 1 non-split map".into()));
    }
    psi_on_reps(t, grp, cfg, poly)
}

/// ψ^ss_P, stored on the Borel coset representatives.
pub fn psi_ss(t: &Tower, grp: &Group, r: usize, poly: &MultiPoly) -> Result<Vec<Fe>> {
    psi_on_reps(t, grp, &PsConfig::split(t.p() as u64, r), poly)
}

/// The twisted ψ, stored on the Borel coset representatives.
pub fn psi_twisted(t: &Tower, grp: &Group, cfg: &PsConfig, poly: &MultiPoly) -> Result<Vec<Fe>> {
    if cfg.split_mode {
        return Err(Error::RangeError("psi_twisted is a non-split map".into()));
    }
    psi_on_reps(t, grp, cfg, poly)
}

/// Elements used for literal (non-certificate) equivariance checks.
pub(crate) fn literal_sample(t: &Tower, grp: &Group) -> Vec<GroupElem> {
    if grp.order() <= 480 {
        return grp.elements().to_vec();
    }
    let mut v = grp.generators(t);
    v.extend(grp.elements().iter().step_by(37).copied());
    v
}

pub(crate) fn random_poly(t: &Tower, profile: &[usize], rng: &mut ChaCha8Rng) -> MultiPoly {
    let fq = t.fq();
    let coeffs = (0..profile_dim(profile)).map(|_| fq[rng.gen_range(0..fq.len())]).collect();
    MultiPoly::from_coeffs(profile, coeffs).expect("profile sized")
}

/// Equivariance certificate, literal check and the matrix/polynomial
/// cross-check for a presentation; returns the stacked matrix of ψ.
fn certify_presentation(
    t: &Tower,
    grp: &Group,
    cfg: &PsConfig,
    domain: &SymRep,
    space: &InducedSpace,
    rep: &mut Report,
) -> Result<Matrix> {
    let pres = Presentation { domain, space, at: Box::new(|g: &GroupElem| ps_eval(t, cfg, g)) };
    let cert = pres.certify(t, grp)?;
    rep.check("equivariance.g_linear", cert.g_linear, "ψ_P(g) = ψ_{g·P}(1) for every g");
    rep.check("equivariance.h_linear", cert.h_linear, "ψ_P(bg) = σ(b)ψ_P(g) for every b in B");
    rep.check("equivariance.homomorphism", cert.homomorphism, "ρ(gs) = ρ(g)ρ(s) on generators");
    let sample = literal_sample(t, grp);
    let lit = pres.literal_check(t, grp, &sample)?;
    rep.check("equivariance.literal", lit, format!("ψ(g·P) = g·ψ(P) on {} elements", sample.len()));
    let mat = pres.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut agree = true;
    for _ in 0..4 {
        let poly = random_poly(t, &cfg.r, &mut rng);
        let direct = psi_on_reps(t, grp, cfg, &poly)?;
        agree &= direct == mat.mul_vec(t, poly.coeffs());
    }
    rep.check("dual_route", agree, "monomial-row matrix agrees with literal ∇ evaluation on 4 random P");
    Ok(mat)
}

/// Certify ψ (f ≥ 1) or ψ^ss: equivariance, kernel = θ-ideal, rank.
pub fn verify_ps(cfg: &PsConfig) -> Result<Report> {
    cfg.validate()?;
    let name = match (cfg.split_mode, cfg.f()) {
        (true, _) => "split",
        (false, 1) => "ps",
        _ => "ps-twisted",
    };
    let mut rep = Report::new(name);
    rep.param("p", cfg.p).param("r", &cfg.r).param("m", &cfg.m);
    let t = Tower::new(cfg.p, cfg.f())?;
    let grp = Group::new(&t)?;
    let domain = SymRep::twisted(&cfg.r);
    let space = InducedSpace::new(&t, &grp, cfg.datum())?;
    let mat = certify_presentation(&t, &grp, cfg, &domain, &space, &mut rep)?;
    let kernel = mat.kernel(&t);
    let rank = domain.dim() - kernel.dim();
    let exps: Vec<usize> = cfg.m.iter().map(|m| m + 1).collect();
    let comp = ideal_component(&t, &cfg.r, &exps);
    rep.check(
        "ideal_in_kernel",
        kernel.contains_all(&t, comp.span()),
        format!("graded ideal component (dim {}) is killed", comp.dim()),
    );
    match ideal(&t, &cfg.r, &exps) {
        Ok(id) => {
            rep.check(
                "kernel_equals_ideal",
                kernel == *id.span(),
                format!("ker ψ (dim {}) vs ideal (dim {})", kernel.dim(), id.dim()),
            );
        }
        Err(Error::ProfileTooSmall { generator, .. }) => {
            rep.check(
                "kernel_equals_ideal",
                false,
                format!(
                    "a generator of multidegree {generator:?} does not fit in {:?}; ker ψ has dim {} but the ideal component has dim {} (generators used: {:?})",
                    cfg.r,
                    kernel.dim(),
                    comp.dim(),
                    comp.used_generators()
                ),
            );
        }
        Err(e) => return Err(e),
    }
    let want = cfg.expected_rank();
    rep.check("rank", rank == want, format!("rank {rank}, expected {want}"));
    rep.check("surjective", rank == space.dim(), format!("rank {rank} of {}", space.dim()));
    rep.dim("domain", domain.dim())
        .dim("kernel", kernel.dim())
        .dim("ideal", comp.dim())
        .dim("quotient", domain.dim() - comp.dim())
        .dim("induced", space.dim())
        .dim("rank", rank);
    if cfg.split_mode {
        split_idempotents(&t, &grp, &space, &mat, &mut rep)?;
    }
    if cfg.f() > 1 {
        let sq = verify_successive_quotients(cfg.p, &cfg.r, &cfg.m)?;
        rep.absorb("successive_quotients", sq);
    }
    Ok(rep.finish())
}

/// The coordinate projections onto the two summands of the split datum.
fn split_idempotents(t: &Tower, grp: &Group, space: &InducedSpace, mat: &Matrix, rep: &mut Report) -> Result<()> {
    let n = space.dim();
    let proj = |which: usize| {
        let mut e = Matrix::zeros(n, n);
        for i in (which..n).step_by(2) {
            e.set(i, i, 1);
        }
        e
    };
    let (e0, e1) = (proj(0), proj(1));
    let algebra = e0.add(t, &e1) == Matrix::identity(n)
        && e0.mul(t, &e0) == e0
        && e1.mul(t, &e1) == e1
        && e0.mul(t, &e1).is_zero();
    rep.check("idempotents.algebra", algebra, "e0 + e1 = 1, e_i² = e_i, e0e1 = 0");
    let commute: Result<Vec<bool>> = grp
        .elements()
        .par_iter()
        .map(|g| {
            let a = space.action_matrix(t, grp, g)?;
            Ok(a.mul(t, &e0) == e0.mul(t, &a) && a.mul(t, &e1) == e1.mul(t, &a))
        })
        .collect();
    rep.check("idempotents.g_stable", commute?.into_iter().all(|b| b), "e0, e1 commute with every g");
    let (d0, d1) = (e0.mul(t, mat).rank(t), e1.mul(t, mat).rank(t));
    let half = n / 2;
    rep.check(
        "image_decomposes",
        d0 == half && d1 == half && mat.rank(t) == n,
        format!("summands of dim {d0} (a·d^(r−1)) and {d1} (d^r), expected {half} each"),
    );
    rep.dim("summand_a", d0).dim("summand_d", d1);
    Ok(())
}

/// Theorem for the split map ψ^ss at (p, r).
pub fn verify_split_case(p: u64, r: usize) -> Result<Report> {
    verify_ps(&PsConfig::split(p, r))
}

/// Quotient actions on V_r / W for every element of `elems`.
fn quotient_actions(t: &Tower, v: &SymRep, w: &Subspace, elems: &[GroupElem]) -> Vec<Matrix> {
    elems.par_iter().map(|g| quotient_action(t, &v.matrix(t, g), w)).collect()
}

/// Splitting V_r/V_r^{(m+1)} ≅ V_r/V_r^{(i+1)} ⊕ V_r^{(i+1)}/V_r^{(m+1)} when p | r − i.
///
/// Certified by an explicit G-equivariant section of the projection onto
/// V_r/V_r^{(i+1)}, found by solving an affine linear system.
pub fn verify_split(p: u64, r: usize, m: usize, i: usize) -> Result<Report> {
    if m as u64 > p - 1 || i >= m || i > r {
        return Err(Error::RangeError(format!("need 0 ≤ i < m ≤ p−1, got i = {i}, m = {m}")));
    }
    if (r - i) as u64 % p != 0 {
        return Err(Error::HypothesisViolated(format!("p = {p} does not divide r − i = {}", r - i)));
    }
    let min = min_degree(p, m);
    if r < min {
        return Err(Error::DegreeTooSmall { r, min });
    }
    let mut rep = Report::new("split-corollary");
    rep.param("p", p).param("r", r).param("m", m).param("i", i);
    let t = Tower::new(p, 1)?;
    let grp = Group::new(&t)?;
    let v = SymRep::twisted(&[r]);
    let wm = ideal(&t, &[r], &[m + 1])?.span().clone();
    let wi = ideal(&t, &[r], &[i + 1])?.span().clone();
    rep.check("filtration", wi.contains_all(&t, &wm), "V^(m+1) ⊆ V^(i+1)");
    let n = v.dim() - wm.dim();
    let n1 = v.dim() - wi.dim();
    // π: V/V^(m+1) → V/V^(i+1) in quotient coordinates.
    let pi_cols: Vec<Vec<Fe>> = (0..n)
        .map(|k| {
            let mut e = vec![0; n];
            e[k] = 1;
            wi.quotient_coords(&t, &wm.lift(&e))
        })
        .collect();
    let pi = Matrix::from_cols(&pi_cols, n1);
    let gens = grp.generators(&t);
    let big = quotient_actions(&t, &v, &wm, &gens);
    let small = quotient_actions(&t, &v, &wi, &gens);
    // Unknown S (n × n1): S·ρ̄1(s) = ρ̄(s)·S and π·S = 1.
    let hom = intertwiner_system(&t, &small, &big);
    let mut rows: Vec<Vec<Fe>> = (0..hom.rows).map(|k| hom.row(k).to_vec()).collect();
    let mut rhs = vec![0; hom.rows];
    for a in 0..n1 {
        for b in 0..n1 {
            let mut row = vec![0; n * n1];
            for k in 0..n {
                row[k * n1 + b] = pi.get(a, k);
            }
            rows.push(row);
            rhs.push(u32::from(a == b));
        }
    }
    let sys = Matrix::from_rows(&rows, n * n1);
    let section = sys.solve(&t, &rhs).map(|x| Matrix { rows: n, cols: n1, data: x });
    rep.check("section_found", section.is_some(), "affine system for an equivariant section");
    if let Some(s) = section {
        let all = grp.elements();
        let ok = all.par_iter().all(|g| {
            let rb = quotient_action(&t, &v.matrix(&t, g), &wm);
            let rs = quotient_action(&t, &v.matrix(&t, g), &wi);
            s.mul(&t, &rs) == rb.mul(&t, &s)
        });
        rep.check("section_equivariant", ok, format!("S ρ̄₁(g) = ρ̄(g) S for all {} g", all.len()));
        rep.check("section_splits", pi.mul(&t, &s) == Matrix::identity(n1), "π S = 1");
        let ker_pi = pi.kernel(&t);
        let img = Subspace::from_vectors(&t, n, &(0..n1).map(|k| s.col(k)).collect::<Vec<_>>());
        let total = ker_pi.sum(&t, &img);
        rep.check(
            "direct_sum",
            total.dim() == n && ker_pi.dim() + img.dim() == n,
            format!("{} + {} = {n}", img.dim(), ker_pi.dim()),
        );
        rep.check(
            "kernel_is_subquotient",
            ker_pi.dim() == wi.dim() - wm.dim(),
            format!("ker π has dim {}, V^(i+1)/V^(m+1) has dim {}", ker_pi.dim(), wi.dim() - wm.dim()),
        );
    }
    rep.dim("quotient", n).dim("first", n1).dim("second", wi.dim() - wm.dim());
    Ok(rep.finish())
}

/// V_r/V_r^{(m+1)} ≅ V_s/V_s^{(m+1)} for r ≡ s mod p−1, by a solved intertwiner
/// and by composing the two ψ presentations.
pub fn verify_periodicity(p: u64, m: usize, r: usize, s: usize, seed: u64) -> Result<Report> {
    let cr = PsConfig::new(p, &[r], &[m]);
    let cs = PsConfig::new(p, &[s], &[m]);
    cr.validate()?;
    cs.validate()?;
    if (r as i64 - s as i64).rem_euclid(p as i64 - 1) != 0 {
        return Err(Error::HypothesisViolated(format!("r = {r} and s = {s} differ mod p − 1")));
    }
    let mut rep = Report::new("periodicity");
    rep.param("p", p).param("m", m).param("r", r).param("s", s).param("seed", seed);
    let t = Tower::new(p, 1)?;
    let grp = Group::new(&t)?;
    let (vr, vs) = (SymRep::twisted(&[r]), SymRep::twisted(&[s]));
    let wr = ideal(&t, &[r], &[m + 1])?.span().clone();
    let ws = ideal(&t, &[s], &[m + 1])?.span().clone();
    let (nr, ns) = (vr.dim() - wr.dim(), vs.dim() - ws.dim());
    rep.check("same_dimension", nr == ns, format!("{nr} vs {ns}"));
    let gens = grp.generators(&t);
    let sols = intertwiners(&t, &quotient_actions(&t, &vr, &wr, &gens), &quotient_actions(&t, &vs, &ws, &gens));
    rep.dim("quotient_r", nr).dim("quotient_s", ns).dim("intertwiners", sols.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = None;
    for _ in 0..32 {
        if sols.is_empty() {
            break;
        }
        let mut m_ = Matrix::zeros(ns, nr);
        for b in &sols {
            m_ = m_.add(&t, &b.scale(&t, rng.gen_range(0..p as u32)));
        }
        if nr == ns && m_.rank(&t) == nr {
            found = Some(m_);
            break;
        }
    }
    rep.check("intertwiner_found", found.is_some(), format!("full-rank combination of {} solutions", sols.len()));
    let all = grp.elements();
    let ar = quotient_actions(&t, &vr, &wr, all);
    let as_ = quotient_actions(&t, &vs, &ws, all);
    if let Some(mm) = &found {
        let ok = (0..all.len()).into_par_iter().all(|k| mm.mul(&t, &ar[k]) == as_[k].mul(&t, mm));
        rep.check("intertwiner_equivariant", ok, format!("M ρ̄_r(g) = ρ̄_s(g) M for all {} g", all.len()));
        rep.check("intertwiner_bijective", mm.rank(&t) == nr, format!("rank {}", mm.rank(&t)));
    }
    // Second route: both quotients map isomorphically onto the same induced space.
    let space = InducedSpace::new(&t, &grp, cr.datum())?;
    let bar = |cfg: &PsConfig, w: &Subspace, n: usize| -> Matrix {
        let full = Matrix::vstack(&space.reps().iter().map(|g| ps_eval(&t, cfg, g)).collect::<Vec<_>>());
        let cols: Vec<Vec<Fe>> = (0..n)
            .map(|k| {
                let mut e = vec![0; n];
                e[k] = 1;
                full.mul_vec(&t, &w.lift(&e))
            })
            .collect();
        Matrix::from_cols(&cols, space.dim())
    };
    let (psi_r, psi_s) = (bar(&cr, &wr, nr), bar(&cs, &ws, ns));
    let route = psi_s.inverse(&t).map(|inv| inv.mul(&t, &psi_r));
    let route_ok = route.as_ref().is_some_and(|nmat| {
        let eq = (0..all.len()).into_par_iter().all(|k| nmat.mul(&t, &ar[k]) == as_[k].mul(&t, nmat));
        let span = Subspace::from_vectors(&t, nr * ns, &sols.iter().map(|b| b.data.clone()).collect::<Vec<_>>());
        eq && span.contains(&t, &nmat.data) && nmat.rank(&t) == nr
    });
    rep.check("second_route", route_ok, "Ψ_s⁻¹Ψ_r is a bijective intertwiner in the solved space");
    Ok(rep.finish())
}

/// D: V_r → V_{r+p−1} induces V_r/V_r^{(m+1)} ≅ V_{r+p−1}/V_{r+p−1}^{(m+1)}.
pub fn verify_d_periodicity(p: u64, r: usize, m: usize) -> Result<Report> {
    if m as u64 > p.saturating_sub(2) {
        return Err(Error::RangeError(format!("m = {m} must be at most p − 2")));
    }
    if binom_mod(r as u64, m as u64 + 1, p as u32) == 0 {
        return Err(Error::BadBinomial { p, r, m: m + 1, hint: String::new() });
    }
    let min = min_degree(p, m);
    if r < min {
        return Err(Error::DegreeTooSmall { r, min });
    }
    let s = r + p as usize - 1;
    let mut rep = Report::new("d-periodicity");
    rep.param("p", p).param("r", r).param("m", m);
    let t = Tower::new(p, 1)?;
    let grp = Group::new(&t)?;
    let (vr, vs) = (SymRep::twisted(&[r]), SymRep::twisted(&[s]));
    let cols: Vec<Vec<Fe>> = (0..=r)
        .map(|k| serre_apply(&t, SerreOp::Classical, &MultiPoly::basis(&[r], k)).map(MultiPoly::into_coeffs))
        .collect::<Result<_>>()?;
    let d = Matrix::from_cols(&cols, s + 1);
    let wr = ideal(&t, &[r], &[m + 1])?.span().clone();
    let ws = ideal(&t, &[s], &[m + 1])?.span().clone();
    let well = wr.basis().iter().all(|v| ws.contains(&t, &d.mul_vec(&t, v)));
    rep.check("well_defined", well, "D(V_r^(m+1)) ⊆ V_{r+p−1}^(m+1)");
    let (nr, ns) = (vr.dim() - wr.dim(), vs.dim() - ws.dim());
    let dbar_cols: Vec<Vec<Fe>> = (0..nr)
        .map(|k| {
            let mut e = vec![0; nr];
            e[k] = 1;
            ws.quotient_coords(&t, &d.mul_vec(&t, &wr.lift(&e)))
        })
        .collect();
    let dbar = Matrix::from_cols(&dbar_cols, ns);
    let rank = dbar.rank(&t);
    rep.check("bijective", nr == ns && rank == nr, format!("{nr} → {ns}, rank {rank}"));
    let all = grp.elements();
    let raw = all.par_iter().all(|g| d.mul(&t, &vr.matrix(&t, g)) == vs.matrix(&t, g).mul(&t, &d));
    rep.check("d_commutes", raw, "D ρ_r(g) = ρ_{r+p−1}(g) D for all g");
    let ind = all.par_iter().all(|g| {
        dbar.mul(&t, &quotient_action(&t, &vr.matrix(&t, g), &wr))
            == quotient_action(&t, &vs.matrix(&t, g), &ws).mul(&t, &dbar)
    });
    rep.check("equivariant", ind, "induced map intertwines the quotient actions");
    rep.dim("quotient_r", nr).dim("quotient_r_plus", ns).dim("rank", rank);
    Ok(rep.finish())
}

/// The exponent vectors of the chain used to count successive quotients:
/// all ones, then θ_0's exponent raised to m_0+1, then θ_1's, and so on.
pub fn quotient_chain(m: &[usize]) -> Vec<Vec<usize>> {
    let mut e = vec![1; m.len()];
    let mut out = vec![e.clone()];
    for (k, &mk) in m.iter().enumerate() {
        for _ in 0..mk {
            e[k] += 1;
            out.push(e.clone());
        }
    }
    out
}

/// Dimensions of the successive quotients of the θ-ideal chain against
/// (q+1)∏_{l<k}(m_l+1).
pub fn verify_successive_quotients(p: u64, r: &[usize], m: &[usize]) -> Result<Report> {
    let f = r.len();
    if m.len() != f {
        return Err(Error::ProfileMismatch { expected: r.to_vec(), got: m.to_vec() });
    }
    let mut rep = Report::new("successive-quotients");
    rep.param("p", p).param("r", r).param("m", m);
    let t = Tower::new(p, f)?;
    let q = t.q() as usize;
    let total = profile_dim(r);
    let chain = quotient_chain(m);
    let dims: Vec<usize> = chain.iter().map(|e| ideal_component(&t, r, e).dim()).collect();
    let misfit = |e: &[usize]| -> Vec<usize> {
        (0..f).filter(|&j| generator_degree(p as usize, f, j, e[j]).iter().zip(r).any(|(a, b)| a > b)).collect()
    };
    let base = total - dims[0];
    rep.check("base", base == q + 1, format!("dim V/⟨θ_0,…,θ_(f−1)⟩ = {base}, expected {}", q + 1));
    rep.dim("base", base);
    let mut step = 0;
    for (k, &mk) in m.iter().enumerate() {
        let want = (q + 1) * m[..k].iter().map(|x| x + 1).product::<usize>();
        for _ in 0..mk {
            let got = dims[step] - dims[step + 1];
            let missing = misfit(&chain[step + 1]);
            let note = if missing.is_empty() {
                String::new()
            } else {
                format!("; generator(s) {missing:?} of {:?} do not fit in {r:?}", chain[step + 1])
            };
            let name = format!("step{}", step + 1);
            rep.check(&name, got == want, format!("{:?} → {:?}: dim {got}, expected {want}{note}", chain[step], chain[step + 1]));
            rep.dim(&name, got);
            step += 1;
        }
    }
    let want_total = (q + 1) * m.iter().map(|x| x + 1).product::<usize>();
    let got_total = total - dims[dims.len() - 1];
    rep.check("total", got_total == want_total, format!("codimension {got_total}, expected {want_total}"));
    rep.dim("total", got_total);
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::borel_basis;
    use crate::theta::dickson;

    #[test]
    fn guards() {
        assert!(matches!(PsConfig::new(5, &[10], &[1]).validate(), Err(Error::BadBinomial { ref hint, .. }) if hint.contains("split")));
        assert!(matches!(PsConfig::new(5, &[7], &[2]).validate(), Err(Error::DegreeTooSmall { .. })));
        assert!(matches!(PsConfig::new(3, &[10, 2], &[1, 0]).validate(), Err(Error::HypothesisViolated(_))));
        assert!(matches!(PsConfig::new(3, &[10, 4], &[3, 0]).validate(), Err(Error::RangeError(_))));
        assert!(matches!(PsConfig::split(5, 21).validate(), Err(Error::NotDivisible { .. })));
        assert!(matches!(PsConfig::split(5, 10).validate(), Err(Error::DegreeTooSmall { .. })));
        assert!(PsConfig::new(5, &[22], &[2]).validate().is_ok());
        assert_eq!(min_degree(5, 2), 17);
    }

    #[test]
    fn m_zero_is_evaluation_and_hits_the_basis() {
        let t = Tower::new(5, 1).unwrap();
        let grp = Group::new(&t).unwrap();
        let r = 9;
        let cfg = PsConfig::new(5, &[r], &[0]);
        let basis = borel_basis(&t, &grp, r as u64);
        for i in 0..5 {
            let sign = if i % 2 == 0 { 1 } else { t.neg(1) };
            let mut e = vec![0; r + 1];
            e[i] = sign;
            let poly = MultiPoly::from_coeffs(&[r], e).unwrap();
            assert_eq!(psi_ps(&t, &grp, &cfg, &poly).unwrap(), basis[i]);
            for g in grp.elements().iter().step_by(17) {
                assert_eq!(psi_value(&t, &cfg, &poly, g).unwrap(), vec![poly.evaluate(&t, &[(g.c, g.d)]).unwrap()]);
            }
        }
        // Y^r − X^{q−1}Y^{r−q+1} maps to φ.
        let mut pq = MultiPoly::zero(&[r]);
        pq.set_coeff(&[r], 1);
        pq.set_coeff(&[r - 4], t.neg(1));
        assert_eq!(psi_ps(&t, &grp, &cfg, &pq).unwrap(), basis[5]);
    }

    #[test]
    fn base_case_p5_r22_m2() {
        let rep = verify_ps(&PsConfig::new(5, &[22], &[2])).unwrap();
        assert!(rep.pass(), "{}", rep.render());
        assert_eq!(rep.dims["quotient"], 18);
        assert_eq!(rep.dims["induced"], 18);
    }

    #[test]
    fn split_case_p5_r20() {
        let rep = verify_split_case(5, 20).unwrap();
        assert!(rep.pass(), "{}", rep.render());
        assert_eq!(rep.dims["rank"], 12);
        let t = Tower::new(5, 1).unwrap();
        let grp = Group::new(&t).unwrap();
        let th2q = dickson(&t).pow(&t, 2).multiply(&t, &MultiPoly::parse(&t, "X0^3*Y0^5+2*Y0^8", 1).unwrap()).unwrap();
        assert!(psi_ss(&t, &grp, 20, &th2q).unwrap().iter().all(|&x| x == 0));
    }

    #[test]
    fn twisted_positive_control() {
        let rep = verify_ps(&PsConfig::new(3, &[10, 7], &[1, 0])).unwrap();
        assert!(rep.pass(), "{}", rep.render());
        assert_eq!(rep.dims["rank"], 20);
    }

    #[test]
    fn twisted_small_profile_kernel_exceeds_ideal() {
        let rep = verify_ps(&PsConfig::new(3, &[10, 4], &[1, 0])).unwrap();
        assert!(rep.get("equivariance.g_linear").unwrap().pass);
        assert!(rep.get("rank").unwrap().pass);
        assert!(!rep.get("kernel_equals_ideal").unwrap().pass);
        assert_eq!(rep.dims["kernel"], 35);
        assert_eq!(rep.dims["ideal"], 32);
    }

    #[test]
    fn split_corollary_p5_r20() {
        let rep = verify_split(5, 20, 2, 0).unwrap();
        assert!(rep.pass(), "{}", rep.render());
        assert_eq!((rep.dims["first"], rep.dims["second"]), (6, 12));
        assert!(matches!(verify_split(5, 22, 2, 0), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn periodicity_p5_m2() {
        let rep = verify_periodicity(5, 2, 22, 18, 7).unwrap();
        assert!(rep.pass(), "{}", rep.render());
        assert!(matches!(verify_periodicity(5, 2, 22, 19, 7), Err(_)));
    }

    #[test]
    fn d_periodicity_p5_r18_m1() {
        let rep = verify_d_periodicity(5, 18, 1).unwrap();
        assert!(rep.pass(), "{}", rep.render());
        assert_eq!(rep.dims["quotient_r"], 12);
        assert!(matches!(verify_d_periodicity(5, 18, 4), Err(Error::RangeError(_))));
    }

    #[test]
    fn chain_shape() {
        assert_eq!(quotient_chain(&[1, 0]), vec![vec![1, 1], vec![2, 1]]);
        assert_eq!(quotient_chain(&[1, 2]), vec![vec![1, 1], vec![2, 1], vec![2, 2], vec![2, 3]]);
    }
}
