//! Dickson polynomials and their twisted analogues, the ideals they generate
//! inside a fixed multidegree, quotient coordinates, and a rewriting
//! calculus on monomials modulo ⟨θ_0, …, θ_{f−1}⟩.

use crate::error::{Error, Result};
use crate::gf::{binom_mod, Fe, Tower};
use crate::linalg::{Matrix, Subspace};
use crate::poly::{decode, encode, profile_dim, twisted_point, MultiPoly, Profile};
use serde::Serialize;
use std::collections::{HashMap, VecDeque};

/// θ = X^pY − XY^p.
pub fn dickson(t: &Tower) -> MultiPoly {
    power_dickson(t, t.p() as usize)
}

/// θ′ = X^qY − XY^q.
pub fn dickson_q(t: &Tower) -> MultiPoly {
    power_dickson(t, t.q() as usize)
}

fn power_dickson(t: &Tower, n: usize) -> MultiPoly {
    let mut p = MultiPoly::zero(&[n + 1]);
    p.set_coeff(&[1], 1);
    p.set_coeff(&[n], t.neg(1));
    p
}

/// θ_j on f slots: θ_0 = X_0Y_{f−1}^p − Y_0X_{f−1}^p, θ_k = X_kY_{k−1}^p − Y_kX_{k−1}^p.
///
/// For f = 1 this is X_0Y_0^p − Y_0X_0^p = −θ.
pub fn twisted_dickson(t: &Tower, f: usize, j: usize) -> Result<MultiPoly> {
    if j >= f {
        return Err(Error::SlotOutOfRange { slot: j, f });
    }
    let p = t.p() as usize;
    let prev = (j + f - 1) % f;
    let mut profile = vec![0; f];
    profile[j] += 1;
    profile[prev] += p;
    let mut out = MultiPoly::zero(&profile);
    // Y-exponents of X_jY_{prev}^p and Y_jX_{prev}^p.
    let mut e1 = vec![0; f];
    e1[prev] += p;
    let mut e2 = vec![0; f];
    e2[j] += 1;
    out.set_coeff(&e1, 1);
    out.set_coeff(&e2, t.neg(1));
    Ok(out)
}

/// Multidegree of θ_j^e.
pub fn generator_degree(p: usize, f: usize, j: usize, e: usize) -> Profile {
    let mut d = vec![0; f];
    d[j] += e;
    d[(j + f - 1) % f] += p * e;
    d
}

/// Span of g·(all monomials) inside the profile, as coefficient vectors.
fn multiples(profile: &[usize], g: &MultiPoly) -> Vec<Vec<Fe>> {
    let cof: Profile = profile.iter().zip(g.profile()).map(|(r, d)| r - d).collect();
    let terms: Vec<(Vec<usize>, Fe)> = g.terms().collect();
    (0..profile_dim(&cof))
        .map(|idx| {
            let e = decode(&cof, idx);
            let mut v = vec![0; profile_dim(profile)];
            for (ge, c) in &terms {
                let sum: Vec<usize> = e.iter().zip(ge).map(|(a, b)| a + b).collect();
                v[encode(profile, &sum)] = *c;
            }
            v
        })
        .collect()
}

/// The homogeneous component ⟨θ_0^{e_0}, …, θ_{f−1}^{e_{f−1}}⟩ ∩ V_profile.
#[derive(Clone, Debug)]
pub struct ThetaIdeal {
    profile: Profile,
    exps: Vec<usize>,
    span: Subspace,
    /// Generators that fit inside the profile.
    used: Vec<usize>,
}

/// The ideal with exponents `exps`; every generator must fit inside the profile.
pub fn ideal(t: &Tower, profile: &[usize], exps: &[usize]) -> Result<ThetaIdeal> {
    let p = t.p() as usize;
    let f = profile.len();
    if exps.len() != f {
        return Err(Error::ProfileMismatch { expected: profile.to_vec(), got: exps.to_vec() });
    }
    for (j, &e) in exps.iter().enumerate() {
        let d = generator_degree(p, f, j, e);
        if d.iter().zip(profile).any(|(a, b)| a > b) {
            return Err(Error::ProfileTooSmall { profile: profile.to_vec(), generator: d });
        }
    }
    Ok(ideal_component(t, profile, exps))
}

/// The graded component of the ideal in the given profile. Generators that
/// do not fit contribute nothing.
pub fn ideal_component(t: &Tower, profile: &[usize], exps: &[usize]) -> ThetaIdeal {
    let p = t.p() as usize;
    let f = profile.len();
    let mut vecs = Vec::new();
    let mut used = Vec::new();
    for (j, &e) in exps.iter().enumerate() {
        let d = generator_degree(p, f, j, e);
        if d.iter().zip(profile).any(|(a, b)| a > b) {
            continue;
        }
        used.push(j);
        let g = twisted_dickson(t, f, j).expect("slot in range").pow(t, e);
        vecs.extend(multiples(profile, &g));
    }
    let span = Subspace::from_vectors(t, profile_dim(profile), &vecs);
    ThetaIdeal { profile: profile.to_vec(), exps: exps.to_vec(), span, used }
}

impl ThetaIdeal {
    pub fn profile(&self) -> &[usize] {
        &self.profile
    }

    pub fn exps(&self) -> &[usize] {
        &self.exps
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    pub fn span(&self) -> &Subspace {
        &self.span
    }

    /// Slots whose generator fits inside the profile.
    pub fn used_generators(&self) -> &[usize] {
        &self.used
    }

    pub fn member(&self, t: &Tower, poly: &MultiPoly) -> Result<bool> {
        if poly.profile() != self.profile.as_slice() {
            return Err(Error::ProfileMismatch { expected: self.profile.clone(), got: poly.profile().to_vec() });
        }
        Ok(self.span.contains(t, poly.coeffs()))
    }

    pub fn quotient(&self) -> QuotientSpace {
        QuotientSpace { sub: self.span.clone() }
    }
}

/// V / I with coordinates on the non-pivot monomials of I's echelon basis.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    sub: Subspace,
}

impl QuotientSpace {
    pub fn new(sub: Subspace) -> QuotientSpace {
        QuotientSpace { sub }
    }

    pub fn dim(&self) -> usize {
        self.sub.ambient() - self.sub.dim()
    }

    /// Monomial indices spanning the quotient.
    pub fn basis_monomials(&self) -> Vec<usize> {
        self.sub.non_pivots()
    }

    pub fn project(&self, t: &Tower, v: &[Fe]) -> Vec<Fe> {
        self.sub.quotient_coords(t, v)
    }

    pub fn sub(&self) -> &Subspace {
        &self.sub
    }
}

/// Does {P : P vanishes on the twisted diagonal over F_q} equal the ideal
/// with all exponents one? For a single slot over a tower with f > 1 the
/// comparison is against ⟨θ′⟩.
pub fn vanishing_membership_check(t: &Tower, profile: &[usize]) -> Result<bool> {
    let q = t.q() as u64;
    let max = crate::gf::max_q();
    if q > max.min(9) {
        return Err(Error::TooLarge { q, max: max.min(9) });
    }
    let f = profile.len();
    let ideal_span = if f == 1 && t.f() > 1 {
        let th = dickson_q(t);
        if th.profile()[0] > profile[0] {
            Subspace::zero(profile_dim(profile))
        } else {
            Subspace::from_vectors(t, profile_dim(profile), &multiples(profile, &th))
        }
    } else if f == t.f() {
        ideal_component(t, profile, &vec![1; f]).span
    } else {
        return Err(Error::ProfileMismatch { expected: vec![0; t.f()], got: profile.to_vec() });
    };
    let vanishing = evaluation_matrix(t, profile).kernel(t);
    Ok(vanishing == ideal_span)
}

/// Rows: twisted-diagonal points (c, d) over F_q; columns: monomials.
pub fn evaluation_matrix(t: &Tower, profile: &[usize]) -> Matrix {
    let f = profile.len();
    let dim = profile_dim(profile);
    let mut rows = Vec::new();
    for &c in t.fq() {
        for &d in t.fq() {
            let pt = twisted_point(t, f, c, d);
            let row: Vec<Fe> = (0..dim)
                .map(|i| MultiPoly::basis(profile, i).evaluate(t, &pt).expect("point matches profile"))
                .collect();
            rows.push(row);
        }
    }
    Matrix::from_rows(&rows, dim)
}

/// θ^{m+1} | P by the coefficient criterion (support window and residue-class sums).
pub fn divides_by_criterion(t: &Tower, poly: &MultiPoly, m: usize) -> bool {
    let p = t.p() as usize;
    let r = poly.profile()[0];
    let b = poly.coeffs();
    for (j, &c) in b.iter().enumerate() {
        if c != 0 && (j < m + 1 || j + m + 1 > r) {
            return false;
        }
    }
    for l in 0..p - 1 {
        for i in 0..=m {
            let mut s = 0;
            for (j, &c) in b.iter().enumerate() {
                if j % (p - 1) == l && c != 0 {
                    s = t.add(s, t.mul(binom_mod(j as u64, i as u64, p as u32), c));
                }
            }
            if s != 0 {
                return false;
            }
        }
    }
    true
}

/// Exact division by θ; `None` when θ does not divide P.
pub fn divide_by_theta(t: &Tower, poly: &MultiPoly) -> Option<MultiPoly> {
    let p = t.p() as usize;
    let r = poly.profile()[0];
    if poly.is_zero() {
        return Some(MultiPoly::zero(&[r.saturating_sub(p + 1)]));
    }
    let b = poly.coeffs();
    // θ = XY(X^{p−1} − Y^{p−1}) forces b_0 = b_r = 0.
    if r < p + 1 || b[0] != 0 || b[r] != 0 {
        return None;
    }
    // Dehomogenize at X = 1 and divide by θ(1, Y) = Y − Y^p from the top.
    let mut rem = b.to_vec();
    let mut quot = vec![0; r - p];
    for top in (p..r).rev() {
        let c = rem[top];
        if c == 0 {
            continue;
        }
        let k = top - p;
        quot[k] = t.neg(c);
        rem[top] = 0;
        rem[k + 1] = t.add(rem[k + 1], c);
    }
    if rem.iter().any(|&c| c != 0) {
        return None;
    }
    MultiPoly::from_coeffs(&[r - p - 1], quot).ok()
}

/// θ^{m+1} | P by repeated exact division.
pub fn divides_by_division(t: &Tower, poly: &MultiPoly, m: usize) -> bool {
    let mut cur = poly.clone();
    for _ in 0..=m {
        if cur.is_zero() {
            return true;
        }
        match divide_by_theta(t, &cur) {
            Some(q) => cur = q,
            None => return false,
        }
    }
    true
}

/// θ^{m+1} | P, f = 1. Uses the coefficient criterion when m ≤ p − 2 and
/// checks it against exact division.
pub fn divides_theta_power(t: &Tower, poly: &MultiPoly, m: usize) -> bool {
    let by_div = divides_by_division(t, poly, m);
    if m + 2 <= t.p() as usize {
        let by_crit = divides_by_criterion(t, poly, m);
        assert_eq!(by_div, by_crit, "divisibility tests disagree on {:?}", poly.coeffs());
    }
    by_div
}

/// A move of the rewriting calculus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    #[serde(rename = "theta0")]
    Theta0,
    #[serde(rename = "thetaK_unequal")]
    ThetaKUnequal,
    #[serde(rename = "thetaK_equal")]
    ThetaKEqual,
}

/// A run of identical moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Move {
    #[serde(rename = "move")]
    pub kind: MoveKind,
    pub slot: usize,
    pub multiplicity: usize,
}

/// Moves applied to each side and the common normal form they reach.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub left: Vec<Move>,
    pub right: Vec<Move>,
    /// Y-exponent vector of the common normal form.
    pub normal_form: Vec<usize>,
}

/// Monomials of a fixed profile, stored as Y-exponents d_j (X-exponents are r_j − d_j).
#[derive(Clone, Debug)]
pub struct Rewriter {
    p: usize,
    profile: Profile,
    budget: usize,
}

fn push_move(moves: &mut Vec<Move>, kind: MoveKind, slot: usize) {
    if let Some(last) = moves.last_mut() {
        if last.kind == kind && last.slot == slot {
            last.multiplicity += 1;
            return;
        }
    }
    moves.push(Move { kind, slot, multiplicity: 1 });
}

impl Rewriter {
    /// Requires r_j ≥ p^{f−j} for every slot.
    pub fn new(t: &Tower, profile: &[usize]) -> Result<Rewriter> {
        let p = t.p() as usize;
        let f = profile.len();
        for (j, &r) in profile.iter().enumerate() {
            let need = p.pow((f - j) as u32);
            if r < need {
                return Err(Error::HypothesisViolated(format!("r_{j} = {r} < p^{} = {need}", f - j)));
            }
        }
        let q = p.pow(f as u32);
        Ok(Rewriter { p, profile: profile.to_vec(), budget: 4 * q * f })
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Σ d_j p^j.
    pub fn weight(&self, d: &[usize]) -> usize {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    fn f(&self) -> usize {
        self.profile.len()
    }

    /// θ_0 move: X_0Y_{f−1}^p ↦ Y_0X_{f−1}^p. Lowers the weight by q − 1.
    pub fn theta0(&self, d: &[usize]) -> Option<Vec<usize>> {
        let f = self.f();
        let last = f - 1;
        let mut e = d.to_vec();
        if self.profile[0] - e[0] < 1 || e[last] < self.p {
            return None;
        }
        e[last] -= self.p;
        e[0] += 1;
        Some(e)
    }

    /// θ_k unequal move: X_kY_{k−1}^p ↦ Y_kX_{k−1}^p. Keeps the weight.
    pub fn unequal(&self, d: &[usize], k: usize) -> Option<Vec<usize>> {
        if k == 0 || k >= self.f() || self.profile[k] - d[k] < 1 || d[k - 1] < self.p {
            return None;
        }
        let mut e = d.to_vec();
        e[k] += 1;
        e[k - 1] -= self.p;
        Some(e)
    }

    /// θ_k equal move, the inverse of the unequal one.
    pub fn equal(&self, d: &[usize], k: usize) -> Option<Vec<usize>> {
        if k == 0 || k >= self.f() || d[k] < 1 || self.profile[k - 1] - d[k - 1] < self.p {
            return None;
        }
        let mut e = d.to_vec();
        e[k] -= 1;
        e[k - 1] += self.p;
        Some(e)
    }

    /// Apply unequal moves greedily (lowest slot first) until none applies.
    pub fn normalize(&self, d: &[usize]) -> Result<(Vec<usize>, Vec<Move>)> {
        let mut cur = d.to_vec();
        let mut moves = Vec::new();
        let mut count = 0;
        'outer: loop {
            for k in 1..self.f() {
                if let Some(e) = self.unequal(&cur, k) {
                    cur = e;
                    push_move(&mut moves, MoveKind::ThetaKUnequal, k);
                    count += 1;
                    if count > self.budget {
                        return Err(Error::NonTerminating { budget: self.budget });
                    }
                    continue 'outer;
                }
            }
            return Ok((cur, moves));
        }
    }

    /// Shortest path of θ_k moves (k ≥ 1) to a state where θ_0 applies.
    fn reach_theta0(&self, d: &[usize]) -> Option<Vec<(MoveKind, usize, Vec<usize>)>> {
        let mut prev: HashMap<Vec<usize>, Option<(Vec<usize>, MoveKind, usize)>> = HashMap::new();
        let mut queue = VecDeque::new();
        prev.insert(d.to_vec(), None);
        queue.push_back(d.to_vec());
        while let Some(cur) = queue.pop_front() {
            if self.theta0(&cur).is_some() {
                let mut path = Vec::new();
                let mut node = cur;
                while let Some(Some((from, kind, k))) = prev.get(&node).cloned() {
                    path.push((kind, k, node.clone()));
                    node = from;
                }
                path.reverse();
                return Some(path);
            }
            for k in 1..self.f() {
                for (kind, next) in
                    [(MoveKind::ThetaKUnequal, self.unequal(&cur, k)), (MoveKind::ThetaKEqual, self.equal(&cur, k))]
                {
                    if let Some(n) = next {
                        if !prev.contains_key(&n) {
                            prev.insert(n.clone(), Some((cur.clone(), kind, k)));
                            queue.push_back(n);
                        }
                    }
                }
            }
        }
        None
    }

    /// Lower the weight of one side by q − 1 through a θ_0 move.
    fn step_down(&self, d: &[usize], moves: &mut Vec<Move>) -> Result<Vec<usize>> {
        let path = self.reach_theta0(d).ok_or_else(|| {
            Error::HypothesisViolated(format!("no θ_0 move reachable from Y-exponents {d:?}"))
        })?;
        let mut cur = d.to_vec();
        for (kind, k, node) in path {
            push_move(moves, kind, k);
            cur = node;
        }
        push_move(moves, MoveKind::Theta0, 0);
        Ok(self.theta0(&cur).expect("path ends where θ_0 applies"))
    }

    /// Drive two monomials with congruent weights to a common normal form.
    pub fn reduce_pair(&self, left: &[usize], right: &[usize]) -> Result<Certificate> {
        let q = self.p.pow(self.f() as u32);
        let (wl, wr) = (self.weight(left), self.weight(right));
        if (wl as i64 - wr as i64).rem_euclid(q as i64 - 1) != 0 {
            return Err(Error::HypothesisViolated(format!("weights {wl} and {wr} differ mod q − 1")));
        }
        // At (0, 1) and (1, 0) only the pure Y and pure X monomials survive.
        let pure_y = |d: &[usize]| d == self.profile.as_slice();
        let pure_x = |d: &[usize]| d.iter().all(|&x| x == 0);
        if pure_y(left) != pure_y(right) || pure_x(left) != pure_x(right) {
            return Err(Error::HypothesisViolated(format!(
                "the difference of {left:?} and {right:?} does not vanish on the twisted diagonal"
            )));
        }
        let mut l = left.to_vec();
        let mut r = right.to_vec();
        let mut lm = Vec::new();
        let mut rm = Vec::new();
        let mut steps = 0;
        while self.weight(&l) != self.weight(&r) {
            steps += 1;
            if steps > self.budget {
                return Err(Error::NonTerminating { budget: self.budget });
            }
            if self.weight(&l) > self.weight(&r) {
                l = self.step_down(&l, &mut lm)?;
            } else {
                r = self.step_down(&r, &mut rm)?;
            }
        }
        let (nl, ml) = self.normalize(&l)?;
        let (nr, mr) = self.normalize(&r)?;
        lm.extend(ml);
        rm.extend(mr);
        if nl != nr {
            return Err(Error::HypothesisViolated(format!("normal forms {nl:?} and {nr:?} differ")));
        }
        let total: usize = lm.iter().chain(&rm).map(|m| m.multiplicity).sum();
        if total > self.budget {
            return Err(Error::NonTerminating { budget: self.budget });
        }
        Ok(Certificate { left: lm, right: rm, normal_form: nl })
    }

    /// Replay a move list, returning every intermediate monomial.
    pub fn replay(&self, start: &[usize], moves: &[Move]) -> Option<Vec<Vec<usize>>> {
        let mut cur = start.to_vec();
        let mut trail = vec![cur.clone()];
        for m in moves {
            for _ in 0..m.multiplicity {
                cur = match m.kind {
                    MoveKind::Theta0 => self.theta0(&cur)?,
                    MoveKind::ThetaKUnequal => self.unequal(&cur, m.slot)?,
                    MoveKind::ThetaKEqual => self.equal(&cur, m.slot)?,
                };
                trail.push(cur.clone());
            }
        }
        Some(trail)
    }

    pub fn monomial(&self, d: &[usize]) -> MultiPoly {
        MultiPoly::monomial(&self.profile, d, 1)
    }
}

/// Check a certificate: every consecutive difference lies in ⟨θ_0, …, θ_{f−1}⟩
/// and both sides end at the stated normal form.
pub fn verify_certificate(
    t: &Tower,
    rw: &Rewriter,
    ideal1: &ThetaIdeal,
    left: &[usize],
    right: &[usize],
    cert: &Certificate,
) -> Result<bool> {
    for (start, moves) in [(left, &cert.left), (right, &cert.right)] {
        let Some(trail) = rw.replay(start, moves) else { return Ok(false) };
        for w in trail.windows(2) {
            let diff = rw.monomial(&w[0]).sub(t, &rw.monomial(&w[1]))?;
            if !ideal1.member(t, &diff)? {
                return Ok(false);
            }
        }
        if trail.last() != Some(&cert.normal_form) {
            return Ok(false);
        }
    }
    let diff = rw.monomial(left).sub(t, &rw.monomial(right))?;
    ideal1.member(t, &diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::Group;
    use rand::{Rng, SeedableRng};

    #[test]
    fn dickson_polynomials() {
        let t = Tower::new(3, 1).unwrap();
        assert_eq!(dickson(&t), MultiPoly::parse(&t, "X0^3*Y0-X0*Y0^3", 1).unwrap());
        assert_eq!(twisted_dickson(&t, 1, 0).unwrap(), dickson(&t).scale(&t, t.neg(1)));
        let t9 = Tower::new(3, 2).unwrap();
        assert_eq!(twisted_dickson(&t9, 2, 1).unwrap(), MultiPoly::parse(&t9, "X1*Y0^3-Y1*X0^3", 2).unwrap());
        assert_eq!(twisted_dickson(&t9, 2, 0).unwrap(), MultiPoly::parse(&t9, "X0*Y1^3-Y0*X1^3", 2).unwrap());
        assert_eq!(twisted_dickson(&t9, 2, 2), Err(Error::SlotOutOfRange { slot: 2, f: 2 }));
    }

    #[test]
    fn ideal_dimensions() {
        let t = Tower::new(5, 1).unwrap();
        let i = ideal(&t, &[22], &[3]).unwrap();
        assert_eq!(i.quotient().dim(), 18);
        assert!(i.member(&t, &MultiPoly::zero(&[22])).unwrap());
        let t9 = Tower::new(3, 2).unwrap();
        assert!(matches!(ideal(&t9, &[10, 4], &[2, 1]), Err(Error::ProfileTooSmall { .. })));
        assert_eq!(ideal(&t9, &[10, 4], &[1, 1]).unwrap().dim(), 45);
        // θ_0² has multidegree (2, 6) and cannot contribute in (10, 4).
        let comp = ideal_component(&t9, &[10, 4], &[2, 1]);
        assert_eq!(comp.dim(), 32);
        assert_eq!(comp.used_generators(), &[1]);
        assert_eq!(ideal(&t9, &[10, 7], &[2, 1]).unwrap().quotient().dim(), 20);
    }

    #[test]
    fn ideals_are_stable() {
        let t = Tower::new(3, 2).unwrap();
        let g = Group::new(&t).unwrap();
        let i = ideal(&t, &[10, 4], &[1, 1]).unwrap();
        for x in g.generators(&t) {
            for v in i.span().basis() {
                let moved = MultiPoly::from_coeffs(&[10, 4], v.clone()).unwrap().substitute_linear(&t, &x).unwrap();
                assert!(i.member(&t, &moved).unwrap());
            }
        }
    }

    #[test]
    fn vanishing_kernels() {
        assert!(vanishing_membership_check(&Tower::new(3, 1).unwrap(), &[8]).unwrap());
        assert!(vanishing_membership_check(&Tower::new(5, 1).unwrap(), &[12]).unwrap());
        let t9 = Tower::new(3, 2).unwrap();
        assert!(vanishing_membership_check(&t9, &[9, 3]).unwrap());
        assert!(vanishing_membership_check(&t9, &[12]).unwrap());
    }

    #[test]
    fn divisibility() {
        let t = Tower::new(5, 1).unwrap();
        let th = dickson(&t);
        for m in 0..3 {
            let p = th.pow(&t, m + 1).multiply(&t, &MultiPoly::parse(&t, "X0^2*Y0", 1).unwrap()).unwrap();
            assert!(divides_theta_power(&t, &p, m));
            let r = p.profile()[0];
            assert!(!divides_theta_power(&t, &MultiPoly::monomial(&[r], &[0], 1), m));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let r = rng.gen_range(0..30);
            let m = rng.gen_range(0..4);
            let mut p = MultiPoly::zero(&[r]);
            for i in 0..=r {
                if rng.gen_bool(0.3) {
                    p.set_coeff(&[i], rng.gen_range(0..5));
                }
            }
            // Also bias toward multiples of θ.
            if rng.gen_bool(0.5) && r >= 6 {
                let mut cof = MultiPoly::zero(&[r - 6]);
                for i in 0..=r - 6 {
                    cof.set_coeff(&[i], rng.gen_range(0..5));
                }
                p = th.multiply(&t, &cof).unwrap();
            }
            divides_theta_power(&t, &p, m);
        }
    }

    #[test]
    fn single_moves_stay_in_ideal() {
        let t = Tower::new(3, 2).unwrap();
        let prof = [10, 4];
        let rw = Rewriter::new(&t, &prof).unwrap();
        let i1 = ideal(&t, &prof, &[1, 1]).unwrap();
        let d = vec![2, 4];
        let e = rw.theta0(&d).unwrap();
        assert_eq!(rw.weight(&d) - rw.weight(&e), 8);
        assert!(i1.member(&t, &rw.monomial(&d).sub(&t, &rw.monomial(&e)).unwrap()).unwrap());
        assert!(matches!(Rewriter::new(&t, &[8, 4]), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn normal_form_is_unique_per_weight() {
        let t = Tower::new(3, 2).unwrap();
        for prof in [[10usize, 4usize], [9, 3], [12, 5], [11, 6]] {
            let rw = Rewriter::new(&t, &prof).unwrap();
            let mut seen: HashMap<usize, Vec<usize>> = HashMap::new();
            for d0 in 0..=prof[0] {
                for d1 in 0..=prof[1] {
                    let d = vec![d0, d1];
                    let (nf, _) = rw.normalize(&d).unwrap();
                    assert_eq!(rw.weight(&nf), rw.weight(&d));
                    let prev = seen.entry(rw.weight(&d)).or_insert_with(|| nf.clone());
                    assert_eq!(*prev, nf, "profile {prof:?}, start {d:?}");
                }
            }
        }
    }

    #[test]
    fn random_certificates_pass_membership() {
        let t = Tower::new(3, 2).unwrap();
        let prof = [10, 4];
        let rw = Rewriter::new(&t, &prof).unwrap();
        let i1 = ideal(&t, &prof, &[1, 1]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 100 {
            let a = vec![rng.gen_range(0..=10), rng.gen_range(0..=4)];
            let b = vec![rng.gen_range(0..=10), rng.gen_range(0..=4)];
            let extreme = |d: &[usize]| d == [0, 0] || d == [10, 4];
            if (rw.weight(&a) as i64 - rw.weight(&b) as i64) % 8 != 0 || (extreme(&a) || extreme(&b)) && a != b {
                continue;
            }
            let cert = rw.reduce_pair(&a, &b).unwrap();
            assert!(verify_certificate(&t, &rw, &i1, &a, &b, &cert).unwrap(), "{a:?} {b:?} {cert:?}");
            done += 1;
        }
    }

    #[test]
    fn f1_equal_weights_need_no_moves() {
        let t = Tower::new(5, 1).unwrap();
        let rw = Rewriter::new(&t, &[12]).unwrap();
        let c = rw.reduce_pair(&[3], &[3]).unwrap();
        assert!(c.left.is_empty() && c.right.is_empty());
        let c = rw.reduce_pair(&[7], &[3]).unwrap();
        assert_eq!(c.left, vec![Move { kind: MoveKind::Theta0, slot: 0, multiplicity: 1 }]);
    }
}
