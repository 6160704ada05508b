//! Generalized dual numbers F_p[ε]/(ε^{m+1}), the projective line over
//! them, and the image of the evaluation map P ↦ (g ↦ P(c, d)).
//!
//! Functions on G(F_p[ε]) that transform by d^r under the Borel are stored as
//! their values on P¹(F_p[ε]) through Bg ↦ [0:1]g, using the canonical points
//! [z:1] and [1:wε]. That identification is only valid when d^r is trivial on
//! the Borel, which is why the image statement needs r ≡ 0 mod p(p − 1).

use crate::error::{Error, Result};
use crate::gf::Tower;
use crate::linalg::Subspace;
use crate::poly::MultiPoly;
use crate::report::Report;
use crate::theta::ideal_component;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

/// Σ z_i ε^i as (z_0, …, z_m) with entries in 0..p.
pub type Dual = Vec<u64>;

/// F_p[ε] with ε^{m+1} = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualRing {
    pub p: u64,
    pub m: usize,
}

impl DualRing {
    pub fn new(p: u64, m: usize) -> Result<DualRing> {
        if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(Error::NotPrime(p));
        }
        Ok(DualRing { p, m })
    }

    pub fn zero(&self) -> Dual {
        vec![0; self.m + 1]
    }

    pub fn one(&self) -> Dual {
        self.scalar(1)
    }

    pub fn scalar(&self, c: u64) -> Dual {
        let mut v = self.zero();
        v[0] = c % self.p;
        v
    }

    pub fn eps(&self) -> Dual {
        let mut v = self.zero();
        if self.m >= 1 {
            v[1] = 1;
        }
        v
    }

    pub fn add(&self, x: &Dual, y: &Dual) -> Dual {
        x.iter().zip(y).map(|(a, b)| (a + b) % self.p).collect()
    }

    pub fn neg(&self, x: &Dual) -> Dual {
        x.iter().map(|a| (self.p - a) % self.p).collect()
    }

    pub fn mul(&self, x: &Dual, y: &Dual) -> Dual {
        let mut out = self.zero();
        for (i, a) in x.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in y.iter().enumerate().take(self.m + 1 - i) {
                out[i + j] = (out[i + j] + a * b) % self.p;
            }
        }
        out
    }

    pub fn pow(&self, x: &Dual, mut n: u64) -> Dual {
        let (mut acc, mut base) = (self.one(), x.clone());
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, x: &Dual) -> bool {
        x[0] != 0
    }

    /// Every element, z_0 slowest.
    pub fn elements(&self) -> Vec<Dual> {
        let n = self.m + 1;
        let total = self.p.pow(n as u32);
        (0..total)
            .map(|mut k| {
                let mut v = vec![0; n];
                for slot in v.iter_mut().rev() {
                    *slot = k % self.p;
                    k /= self.p;
                }
                v
            })
            .collect()
    }

    /// The ideal εF_p[ε].
    pub fn eps_multiples(&self) -> Vec<Dual> {
        self.elements().into_iter().filter(|x| x[0] == 0).collect()
    }

    /// 1/j! in F_p; needs j < p.
    fn inv_factorial(&self, j: usize) -> Result<u64> {
        if j as u64 >= self.p {
            return Err(Error::FactorialNotInvertible { p: self.p, m: self.m });
        }
        let f = (1..=j as u64).fold(1, |a, b| a * b % self.p);
        Ok(pow_mod(f, self.p - 2, self.p))
    }
}

fn pow_mod(mut a: u64, mut n: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        n >>= 1;
    }
    acc
}

/// A point of P¹(F_p[ε]) in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProjPoint {
    /// [z : 1]
    Affine(Dual),
    /// [1 : w] with w ∈ εF_p[ε]
    Infinite(Dual),
}

impl ProjPoint {
    /// Canonical form of [x : y] for a unimodular pair.
    pub fn normalize(ring: &DualRing, x: &Dual, y: &Dual) -> Option<ProjPoint> {
        if ring.is_unit(y) {
            Some(ProjPoint::Affine(ring.mul(x, &unit_inverse(ring, y))))
        } else if ring.is_unit(x) {
            Some(ProjPoint::Infinite(ring.mul(y, &unit_inverse(ring, x))))
        } else {
            None
        }
    }
}

fn unit_inverse(ring: &DualRing, x: &Dual) -> Dual {
    // x = x_0(1 + n) with n nilpotent; 1/(1 + n) = Σ (−n)^k.
    let x0inv = pow_mod(x[0], ring.p - 2, ring.p);
    let u = ring.mul(x, &ring.scalar(x0inv));
    let mut n = ring.add(&u, &ring.neg(&ring.one()));
    n = ring.neg(&n);
    let mut acc = ring.one();
    let mut term = ring.one();
    for _ in 0..ring.m {
        term = ring.mul(&term, &n);
        acc = ring.add(&acc, &term);
    }
    ring.mul(&acc, &ring.scalar(x0inv))
}

/// All canonical points: affine ones by z, then the points at infinity by w.
pub fn proj_points(ring: &DualRing) -> Vec<ProjPoint> {
    let mut v: Vec<ProjPoint> = ring.elements().into_iter().map(ProjPoint::Affine).collect();
    v.extend(ring.eps_multiples().into_iter().map(ProjPoint::Infinite));
    v
}

fn eval_poly(ring: &DualRing, coeffs: &[u64], x: &Dual, y: &Dual) -> Dual {
    let r = coeffs.len() - 1;
    let mut acc = ring.zero();
    for (i, &b) in coeffs.iter().enumerate() {
        if b == 0 {
            continue;
        }
        let term = ring.mul(&ring.pow(x, (r - i) as u64), &ring.pow(y, i as u64));
        acc = ring.add(&acc, &ring.mul(&term, &ring.scalar(b)));
    }
    acc
}

fn fp_coeffs(t: &Tower, poly: &MultiPoly) -> Result<Vec<u64>> {
    if poly.f() != 1 {
        return Err(Error::ProfileMismatch { expected: vec![poly.profile()[0]], got: poly.profile().to_vec() });
    }
    poly.coeffs()
        .iter()
        .map(|&c| {
            if t.in_level(c, crate::gf::Level::Base) {
                Ok(c as u64)
            } else {
                Err(Error::LevelMismatch(format!("coefficient {} is not in F_p", t.fmt(c))))
            }
        })
        .collect()
}

/// ψ_P as a function on P¹(F_p[ε]): [z:1] ↦ P(z, 1), [1:w] ↦ P(1, w).
pub fn psi_dual(t: &Tower, poly: &MultiPoly, ring: &DualRing) -> Result<Vec<Dual>> {
    let b = fp_coeffs(t, poly)?;
    Ok(proj_points(ring)
        .iter()
        .map(|pt| match pt {
            ProjPoint::Affine(z) => eval_poly(ring, &b, z, &ring.one()),
            ProjPoint::Infinite(w) => eval_poly(ring, &b, &ring.one(), w),
        })
        .collect())
}

/// Taylor condition on every fiber: f(z_0 + w) = Σ_j w^j/j! f^{(j)}(z_0) for
/// all w ∈ εF_p[ε], with the constants read off at w = ε; same at infinity.
pub fn is_smooth(ring: &DualRing, values: &[Dual]) -> Result<bool> {
    let pts = proj_points(ring);
    if values.len() != pts.len() {
        return Err(Error::IndexOutOfRange { index: values.len(), max: pts.len() });
    }
    let invf: Vec<u64> = (0..=ring.m).map(|j| ring.inv_factorial(j)).collect::<Result<_>>()?;
    let index: std::collections::HashMap<&ProjPoint, usize> = pts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let eps = ring.eps();
    let ws = ring.eps_multiples();
    let fibers: Vec<Box<dyn Fn(&Dual) -> ProjPoint>> = (0..ring.p)
        .map(|z0| {
            let base = ring.scalar(z0);
            Box::new(move |w: &Dual| ProjPoint::Affine(ring.add(&base, w))) as Box<dyn Fn(&Dual) -> ProjPoint>
        })
        .chain(std::iter::once(Box::new(|w: &Dual| ProjPoint::Infinite(w.clone())) as Box<dyn Fn(&Dual) -> ProjPoint>))
        .collect();
    for at in &fibers {
        let probe = &values[index[&at(&eps)]];
        // coefficient j of f(z_0 + ε) is f^{(j)}/j!
        let consts: Vec<u64> = (0..=ring.m).map(|j| probe[j] * pow_mod(invf[j], ring.p - 2, ring.p) % ring.p).collect();
        for w in &ws {
            let mut expect = ring.zero();
            for (j, &c) in consts.iter().enumerate() {
                let term = ring.mul(&ring.pow(w, j as u64), &ring.scalar(c * invf[j] % ring.p));
                expect = ring.add(&expect, &term);
            }
            if values[index[&at(w)]] != expect {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// F_p-valued at the points of P¹(F_p).
pub fn is_rational_on_rational_points(ring: &DualRing, values: &[Dual]) -> bool {
    proj_points(ring).iter().zip(values).all(|(pt, v)| {
        let rational = match pt {
            ProjPoint::Affine(z) => z[1..].iter().all(|&x| x == 0),
            ProjPoint::Infinite(w) => w.iter().all(|&x| x == 0),
        };
        !rational || v[1..].iter().all(|&x| x == 0)
    })
}

fn flatten(values: &[Dual]) -> Vec<u32> {
    values.iter().flatten().map(|&x| x as u32).collect()
}

/// Basis of W built fiber by fiber: w ↦ w^j/j! on one fiber, zero elsewhere.
fn w_basis(ring: &DualRing) -> Result<Vec<Vec<Dual>>> {
    let pts = proj_points(ring);
    let mut out = Vec::new();
    for fiber in 0..=ring.p {
        for j in 0..=ring.m {
            let c = ring.inv_factorial(j)?;
            let f: Vec<Dual> = pts
                .iter()
                .map(|pt| {
                    let (fib, w) = match pt {
                        ProjPoint::Affine(z) => {
                            let mut w = z.clone();
                            w[0] = 0;
                            (z[0], w)
                        }
                        ProjPoint::Infinite(w) => (ring.p, w.clone()),
                    };
                    if fib == fiber {
                        ring.mul(&ring.pow(&w, j as u64), &ring.scalar(c))
                    } else {
                        ring.zero()
                    }
                })
                .collect();
            out.push(f);
        }
    }
    Ok(out)
}

/// Number of smooth functions on one fiber, by enumerating every function on
/// it when that is small enough, else by counting distinct Taylor expansions.
fn smooth_functions_per_fiber(ring: &DualRing) -> Result<u64> {
    let ws = ring.eps_multiples();
    let vals = ring.elements();
    let invf: Vec<u64> = (0..=ring.m).map(|j| ring.inv_factorial(j)).collect::<Result<_>>()?;
    let taylor = |consts: &[u64], w: &Dual| -> Dual {
        let mut acc = ring.zero();
        for (j, &c) in consts.iter().enumerate() {
            acc = ring.add(&acc, &ring.mul(&ring.pow(w, j as u64), &ring.scalar(c * invf[j] % ring.p)));
        }
        acc
    };
    let total = (vals.len() as u64).checked_pow(ws.len() as u32);
    if let Some(total) = total.filter(|&n| n <= 1 << 20) {
        let mut count = 0;
        for mut k in 0..total {
            let f: Vec<&Dual> = ws
                .iter()
                .map(|_| {
                    let v = &vals[(k % vals.len() as u64) as usize];
                    k /= vals.len() as u64;
                    v
                })
                .collect();
            // constants from w = ε, then the Taylor condition everywhere
            let ie = ws.iter().position(|w| *w == ring.eps()).expect("ε is in the ideal");
            let consts: Vec<u64> = (0..=ring.m).map(|j| f[ie][j] * pow_mod(invf[j], ring.p - 2, ring.p) % ring.p).collect();
            if ws.iter().zip(&f).all(|(w, v)| taylor(&consts, w) == **v) {
                count += 1;
            }
        }
        return Ok(count);
    }
    let mut seen = HashSet::new();
    for consts in ring.elements() {
        let f: Vec<Dual> = ws.iter().map(|w| taylor(&consts, w)).collect();
        seen.insert(f);
    }
    Ok(seen.len() as u64)
}

/// Im ψ = W for r ≡ 0 mod p(p − 1): echelon bases agree, dim (m+1)(p+1),
/// |W| = p^{(m+1)(p+1)}, ker ψ = V_r^{(m+1)}, plus ring and coset sanity checks.
pub fn verify_image(p: u64, m: usize, r: usize) -> Result<Report> {
    let ring = DualRing::new(p, m)?;
    if m as u64 >= p {
        return Err(Error::FactorialNotInvertible { p, m });
    }
    if r as u64 % (p * (p - 1)) != 0 {
        return Err(Error::RangeError(format!("r = {r} is not divisible by p(p-1) = {}", p * (p - 1))));
    }
    let mut rep = Report::new("dual-image");
    rep.param("p", p).param("m", m).param("r", r);
    let t = Tower::new(p, 1)?;

    let e = ring.eps();
    rep.check(
        "ring.nilpotent",
        ring.pow(&e, m as u64 + 1) == ring.zero() && (m == 0 || ring.pow(&e, m as u64) != ring.zero()),
        "ε^(m+1) = 0 and ε^m ≠ 0",
    );
    let units: Vec<Dual> = ring.elements().into_iter().filter(|x| ring.is_unit(x)).collect();
    let inv_ok = units.iter().all(|u| ring.mul(u, &unit_inverse(&ring, u)) == ring.one());
    let want_units = (p - 1) * p.pow(m as u32);
    rep.check("ring.units", units.len() as u64 == want_units && inv_ok, format!("{} units, expected (p-1)p^m = {want_units}", units.len()));
    let pts = proj_points(&ring);
    let want_pts = p.pow(m as u32) * (p + 1);
    rep.check("points", pts.len() as u64 == want_pts, format!("{} points, expected p^m(p+1) = {want_pts}", pts.len()));

    coset_checks(&ring, r, &mut rep)?;

    let images: Vec<Vec<Dual>> =
        (0..=r).map(|i| psi_dual(&t, &MultiPoly::basis(&[r], i), &ring)).collect::<Result<_>>()?;
    let mut in_w = true;
    for f in &images {
        in_w &= is_smooth(&ring, f)? && is_rational_on_rational_points(&ring, f);
    }
    rep.check("image_in_w", in_w, "every ψ(X^(r-i)Y^i) is smooth and F_p-valued on P¹(F_p)");
    let wb = w_basis(&ring)?;
    let mut wb_ok = true;
    for f in &wb {
        wb_ok &= is_smooth(&ring, f)? && is_rational_on_rational_points(&ring, f);
    }
    let amb = pts.len() * (m + 1);
    let im = Subspace::from_vectors(&t, amb, &images.iter().map(|f| flatten(f)).collect::<Vec<_>>());
    let w = Subspace::from_vectors(&t, amb, &wb.iter().map(|f| flatten(f)).collect::<Vec<_>>());
    let want_dim = (m + 1) * (p as usize + 1);
    rep.check("w_basis", wb_ok && w.dim() == want_dim, format!("dim W = {} (expected (m+1)(p+1) = {want_dim})", w.dim()));
    rep.check("image_equals_w", im == w, format!("echelon bases agree (dim Im = {}, dim W = {})", im.dim(), w.dim()));
    let per_fiber = smooth_functions_per_fiber(&ring)?;
    let card = per_fiber.checked_pow(p as u32 + 1);
    let want_card = p.checked_pow(want_dim as u32);
    rep.check(
        "w_cardinality",
        card.is_some() && card == want_card,
        format!("{per_fiber} smooth functions per fiber, |W| = p^{want_dim}"),
    );

    // ker ψ = V_r^{(m+1)}
    let cols: Vec<Vec<u32>> = images.iter().map(|f| flatten(f)).collect();
    let mat = crate::linalg::Matrix::from_cols(&cols, amb);
    let kernel = mat.kernel(&t);
    let ideal = ideal_component(&t, &[r], &[m + 1]);
    rep.check("kernel_is_theta_ideal", kernel == *ideal.span(), format!("kernel {} vs θ^(m+1) multiples {}", kernel.dim(), ideal.dim()));

    // random P: smoothness preserved under sums
    let mut rng = ChaCha8Rng::seed_from_u64(0xd0a1);
    let mut sums = true;
    for _ in 0..8 {
        let c: Vec<u32> = (0..=r).map(|_| rng.gen_range(0..p as u32)).collect();
        let f = psi_dual(&t, &MultiPoly::from_coeffs(&[r], c)?, &ring)?;
        sums &= is_smooth(&ring, &f)?;
    }
    rep.check("random_p_smooth", sums, "ψ of 8 random P is smooth");
    rep.dim("points", pts.len()).dim("image", im.dim()).dim("w", w.dim()).dim("kernel", kernel.dim());
    Ok(rep.finish())
}

type Mat2 = [Dual; 4];

fn mat_mul(ring: &DualRing, x: &Mat2, y: &Mat2) -> Mat2 {
    let f = |a: &Dual, b: &Dual, c: &Dual, d: &Dual| ring.add(&ring.mul(a, b), &ring.mul(c, d));
    [f(&x[0], &y[0], &x[1], &y[2]), f(&x[0], &y[1], &x[1], &y[3]), f(&x[2], &y[0], &x[3], &y[2]), f(&x[2], &y[1], &x[3], &y[3])]
}

/// G(F_p[ε]) = ⊔ B·(1 0; z 1) ⊔ ⊔ B·(0 1; 1 w): every g has exactly one such
/// factorization, its representative matches the point [0:1]g, and ψ_P(g) = P(c, d)
/// only depends on that point. Exhaustive when p^{4(m+1)} is at most 400 000.
fn coset_checks(ring: &DualRing, r: usize, rep: &mut Report) -> Result<()> {
    let n = ring.p.pow(4 * (ring.m as u32 + 1));
    if n > 400_000 {
        rep.check("cosets", true, format!("skipped: {n} matrices"));
        return Ok(());
    }
    let elems = ring.elements();
    let one = ring.one();
    let zero = ring.zero();
    let reps: Vec<(ProjPoint, Mat2)> = proj_points(ring)
        .into_iter()
        .map(|pt| {
            let m = match &pt {
                ProjPoint::Affine(z) => [one.clone(), zero.clone(), z.clone(), one.clone()],
                ProjPoint::Infinite(w) => [zero.clone(), one.clone(), one.clone(), w.clone()],
            };
            (pt, m)
        })
        .collect();
    // inverse of a representative
    let inv_rep = |m: &Mat2| -> Mat2 {
        // det = ±1 for both shapes
        let det = ring.add(&ring.mul(&m[0], &m[3]), &ring.neg(&ring.mul(&m[1], &m[2])));
        let di = unit_inverse(ring, &det);
        [ring.mul(&m[3], &di), ring.neg(&ring.mul(&m[1], &di)), ring.neg(&ring.mul(&m[2], &di)), ring.mul(&m[0], &di)]
    };
    let reps_inv: Vec<Mat2> = reps.iter().map(|(_, m)| inv_rep(m)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc05e7);
    let b: Vec<u64> = (0..=r).map(|_| rng.gen_range(0..ring.p)).collect();
    let (mut count, mut unique, mut matches, mut invariant) = (0u64, true, true, true);
    for a in &elems {
        for bb in &elems {
            for c in &elems {
                for d in &elems {
                    let det = ring.add(&ring.mul(a, d), &ring.neg(&ring.mul(bb, c)));
                    if !ring.is_unit(&det) {
                        continue;
                    }
                    count += 1;
                    let g: Mat2 = [a.clone(), bb.clone(), c.clone(), d.clone()];
                    let hits: Vec<usize> = reps_inv
                        .iter()
                        .enumerate()
                        .filter(|(_, ri)| mat_mul(ring, &g, ri)[2] == zero)
                        .map(|(i, _)| i)
                        .collect();
                    unique &= hits.len() == 1;
                    let pt = ProjPoint::normalize(ring, c, d);
                    matches &= hits.len() == 1 && pt.as_ref() == Some(&reps[hits[0]].0);
                    if let (Some(i), true) = (hits.first(), r as u64 % (ring.p * (ring.p - 1)) == 0) {
                        let (x, y) = match &reps[*i].0 {
                            ProjPoint::Affine(z) => (z.clone(), one.clone()),
                            ProjPoint::Infinite(w) => (one.clone(), w.clone()),
                        };
                        invariant &= eval_poly(ring, &b, c, d) == eval_poly(ring, &b, &x, &y);
                    }
                }
            }
        }
    }
    let want = (ring.p * ring.p - 1) * (ring.p * ring.p - ring.p) * ring.p.pow(4 * ring.m as u32);
    rep.check("cosets.order", count == want, format!("|G(F_p[ε])| = {count}, expected {want}"));
    rep.check("cosets.unique", unique, "each g lies in exactly one coset B·rep");
    rep.check("cosets.point", matches, "the coset of g is the point [0:1]g");
    rep.check("cosets.psi_well_defined", invariant, "P(c, d) depends only on [c:d] for a random P");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_counts() {
        for (p, m, n) in [(3, 1, 12), (5, 1, 30), (3, 2, 36)] {
            assert_eq!(proj_points(&DualRing::new(p, m).unwrap()).len(), n);
        }
    }

    #[test]
    fn ring_arithmetic() {
        let r = DualRing::new(5, 2).unwrap();
        let e = r.eps();
        assert_eq!(r.pow(&e, 3), r.zero());
        assert_ne!(r.pow(&e, 2), r.zero());
        let units = r.elements().into_iter().filter(|x| r.is_unit(x)).count();
        assert_eq!(units, 4 * 25);
        let x = vec![3, 1, 4];
        assert_eq!(r.mul(&x, &unit_inverse(&r, &x)), r.one());
    }

    #[test]
    fn x_to_the_r() {
        let t = Tower::new(3, 1).unwrap();
        let ring = DualRing::new(3, 1).unwrap();
        let f = psi_dual(&t, &MultiPoly::basis(&[12], 0), &ring).unwrap();
        for (pt, v) in proj_points(&ring).iter().zip(&f) {
            if let ProjPoint::Affine(z) = pt {
                assert_eq!(*v, ring.pow(z, 12));
            }
        }
    }

    #[test]
    fn smoothness_examples() {
        let ring = DualRing::new(3, 1).unwrap();
        let n = proj_points(&ring).len();
        let constant = vec![ring.scalar(2); n];
        assert!(is_smooth(&ring, &constant).unwrap());
        // break the Taylor relation at [1+2ε : 1] only
        let mut bad = constant.clone();
        let i = proj_points(&ring).iter().position(|pt| *pt == ProjPoint::Affine(vec![1, 2])).unwrap();
        bad[i] = vec![2, 1];
        assert!(!is_smooth(&ring, &bad).unwrap());
        assert!(matches!(is_smooth(&DualRing::new(3, 3).unwrap(), &vec![vec![0; 4]; 108]), Err(Error::FactorialNotInvertible { .. })));
    }

    #[test]
    fn image_p3_m1_r12() {
        let r = verify_image(3, 1, 12).unwrap();
        assert!(r.pass(), "{}", r.render());
        assert_eq!(r.dims["image"], 8);
        assert_eq!(r.dims["w"], 8);
    }

    #[test]
    fn image_guards() {
        assert!(matches!(verify_image(3, 3, 12), Err(Error::FactorialNotInvertible { .. })));
        assert!(matches!(verify_image(3, 1, 10), Err(Error::RangeError(_))));
    }

    #[test]
    fn theta_power_multiples_vanish() {
        let t = Tower::new(3, 1).unwrap();
        let ring = DualRing::new(3, 1).unwrap();
        let th2 = crate::theta::dickson(&t).pow(&t, 2);
        let q = MultiPoly::parse(&t, "X0^3*Y0+2*Y0^4", 1).unwrap();
        let f = psi_dual(&t, &th2.multiply(&t, &q).unwrap(), &ring).unwrap();
        assert!(f.iter().all(|v| v.iter().all(|&x| x == 0)));
    }
}
