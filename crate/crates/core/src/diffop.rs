//! Differential operators: directional derivatives ∇ (optionally twisted
//! per slot), the Serre operator D and the twisted operators D_j.

use crate::error::{Error, Result};
use crate::gf::{binom_mod, falling, Fe, Tower};
use crate::grp::GroupElem;
use crate::poly::{encode, MultiPoly, Profile};

/// Directional derivative a ∂/∂X_j + b ∂/∂Y_j.
///
/// With `twisted` set the direction is raised to (a^{p^j}, b^{p^j}).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NablaOp {
    pub slot: usize,
    pub a: Fe,
    pub b: Fe,
    pub twisted: bool,
}

impl NablaOp {
    pub fn new(slot: usize, a: Fe, b: Fe) -> NablaOp {
        NablaOp { slot, a, b, twisted: false }
    }

    pub fn twisted(slot: usize, a: Fe, b: Fe) -> NablaOp {
        NablaOp { slot, a, b, twisted: true }
    }

    /// The direction actually used on slot `slot`.
    pub fn direction(&self, t: &Tower) -> (Fe, Fe) {
        if self.twisted {
            let j = self.slot as i64;
            (t.frobenius(self.a, j), t.frobenius(self.b, j))
        } else {
            (self.a, self.b)
        }
    }

    /// ∇^k P, expanded binomially on each monomial.
    pub fn apply(&self, t: &Tower, k: usize, poly: &MultiPoly) -> Result<MultiPoly> {
        let j = self.slot;
        if j >= poly.f() {
            return Err(Error::SlotOutOfRange { slot: j, f: poly.f() });
        }
        let r = poly.profile()[j];
        let mut profile: Profile = poly.profile().to_vec();
        profile[j] = r.saturating_sub(k);
        let mut out = MultiPoly::zero(&profile);
        if k > r {
            return Ok(out);
        }
        let (a, b) = self.direction(t);
        let p = t.p();
        let mut acc = out.coeffs().to_vec();
        for (mut e, c) in poly.terms() {
            let i = e[j];
            for l in 0..=k.min(i) {
                if k - l > r - i {
                    continue;
                }
                let w = [
                    binom_mod(k as u64, l as u64, p),
                    falling((r - i) as i64, (k - l) as i64, p),
                    falling(i as i64, l as i64, p),
                    t.pow(a, (k - l) as u64),
                    t.pow(b, l as u64),
                ]
                .into_iter()
                .fold(c, |x, y| t.mul(x, y));
                if w == 0 {
                    continue;
                }
                e[j] = i - l;
                let idx = encode(&profile, &e);
                acc[idx] = t.add(acc[idx], w);
                e[j] = i;
            }
        }
        out = MultiPoly::from_coeffs(&profile, acc)?;
        Ok(out)
    }
}

/// k-fold application of a directional derivative.
pub fn nabla_apply(t: &Tower, op: &NablaOp, k: usize, poly: &MultiPoly) -> Result<MultiPoly> {
    op.apply(t, k, poly)
}

/// Values ∇^k(X^{r−i}Y^i) at (x, y) for i = 0..=r, with direction (a, b).
///
/// This is the row of the functional P ↦ ∇^k(P)|_{(x,y)} on the monomial basis.
pub fn nabla_eval_row(t: &Tower, r: usize, k: usize, dir: (Fe, Fe), pt: (Fe, Fe)) -> Vec<Fe> {
    let p = t.p();
    let (a, b) = dir;
    let (x, y) = pt;
    let mut row = vec![0; r + 1];
    if k > r {
        return row;
    }
    for (i, slot) in row.iter_mut().enumerate() {
        let mut acc = 0;
        for l in 0..=k.min(i) {
            if k - l > r - i {
                continue;
            }
            let coef = t.mul(
                binom_mod(k as u64, l as u64, p),
                t.mul(falling((r - i) as i64, (k - l) as i64, p), falling(i as i64, l as i64, p)),
            );
            if coef == 0 {
                continue;
            }
            let v = [
                t.pow(a, (k - l) as u64),
                t.pow(b, l as u64),
                t.pow(x, (r - i - (k - l)) as u64),
                t.pow(y, (i - l) as u64),
            ]
            .into_iter()
            .fold(coef, |u, w| t.mul(u, w));
            acc = t.add(acc, v);
        }
        *slot = acc;
    }
    row
}

/// Serre operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SerreOp {
    /// X^q ∂/∂X + Y^q ∂/∂Y on one slot.
    Classical,
    /// The twisted operator D_j on f slots.
    Twisted(usize),
}

fn prefactor(t: &Tower, f: usize, j: usize) -> Vec<usize> {
    let p = t.p() as usize;
    // X-exponents of the monomial prefactor of D_j.
    (0..f)
        .map(|l| {
            if l == 0 {
                p
            } else if j == 0 || l < j {
                p - 1
            } else {
                0
            }
        })
        .collect()
}

/// Apply a Serre operator once.
pub fn serre_apply(t: &Tower, op: SerreOp, poly: &MultiPoly) -> Result<MultiPoly> {
    match op {
        SerreOp::Classical => {
            if poly.f() != 1 {
                return Err(Error::ProfileMismatch { expected: vec![poly.profile()[0]], got: poly.profile().to_vec() });
            }
            let q = t.q() as usize;
            let r = poly.profile()[0];
            let mut out = MultiPoly::zero(&[r + q - 1]);
            for (e, c) in poly.terms() {
                let i = e[0];
                // X^{r−i}Y^i ↦ (r−i)X^{r−i+q−1}Y^i + i X^{r−i}Y^{i+q−1}
                for (w, idx) in [(r - i, i), (i, i + q - 1)] {
                    let v = t.mul(c, t.from_int(w as i64));
                    if v != 0 {
                        let old = out.coeff(&[idx]);
                        out.set_coeff(&[idx], t.add(old, v));
                    }
                }
            }
            Ok(out)
        }
        SerreOp::Twisted(j) => {
            let f = poly.f();
            if j >= f {
                return Err(Error::SlotOutOfRange { slot: j, f });
            }
            let p = t.p() as usize;
            let pre = prefactor(t, f, j);
            let r = poly.profile();
            let mut out_profile: Profile = r.iter().zip(&pre).map(|(a, b)| a + b).collect();
            out_profile[j] = (r[j] + pre[j]).saturating_sub(1);
            for l in 1..f {
                if out_profile[l] > p - 1 {
                    return Err(Error::ProfileOverflow { slot: l, degree: out_profile[l], cap: p - 1 });
                }
            }
            let mut out = MultiPoly::zero(&out_profile);
            if r[j] == 0 {
                return Ok(out);
            }
            let mut acc = out.coeffs().to_vec();
            for (e, c) in poly.terms() {
                let i = e[j];
                // X-part: (r_j − i) · X-prefactor, Y-exponents unchanged.
                let wx = t.mul(c, t.from_int((r[j] - i) as i64));
                if wx != 0 {
                    let idx = encode(&out_profile, &e);
                    acc[idx] = t.add(acc[idx], wx);
                }
                // Y-part: i · Y-prefactor, Y-exponents grow by the prefactor and drop by one in slot j.
                let wy = t.mul(c, t.from_int(i as i64));
                if wy != 0 {
                    let mut ey: Vec<usize> = e.iter().zip(&pre).map(|(a, b)| a + b).collect();
                    ey[j] -= 1;
                    let idx = encode(&out_profile, &ey);
                    acc[idx] = t.add(acc[idx], wy);
                }
            }
            out = MultiPoly::from_coeffs(&out_profile, acc)?;
            Ok(out)
        }
    }
}

/// m-fold application.
pub fn serre_power(t: &Tower, op: SerreOp, m: usize, poly: &MultiPoly) -> Result<MultiPoly> {
    let mut cur = poly.clone();
    for _ in 0..m {
        cur = serre_apply(t, op, &cur)?;
    }
    Ok(cur)
}

/// D_j(g·P) − g·D_j(P).
pub fn dj_equivariance_defect(t: &Tower, j: usize, g: &GroupElem, poly: &MultiPoly) -> Result<MultiPoly> {
    let lhs = serre_apply(t, SerreOp::Twisted(j), &poly.substitute_linear(t, g)?)?;
    let rhs = serre_apply(t, SerreOp::Twisted(j), poly)?.substitute_linear(t, g)?;
    lhs.sub(t, &rhs)
}

/// Domain profile of D_j for the twisted cuspidal setting with parameter r_0.
pub fn dj_domain(p: usize, f: usize, r0: usize, j: usize) -> Profile {
    if j == 0 {
        let mut v = vec![0; f];
        v[0] = r0;
        return v;
    }
    (0..f)
        .map(|l| {
            if l == 0 {
                r0 - 1
            } else if l < j {
                0
            } else if l == j {
                p
            } else {
                p - 1
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::Group;

    fn parse(t: &Tower, s: &str, f: usize) -> MultiPoly {
        MultiPoly::parse(t, s, f).unwrap()
    }

    #[test]
    fn nabla_of_theta() {
        let t = Tower::new(5, 1).unwrap();
        let th = parse(&t, "X0^5*Y0-X0*Y0^5", 1);
        for (a, b) in [(0, 1), (2, 3), (4, 0)] {
            let got = NablaOp::new(0, a, b).apply(&t, 1, &th).unwrap();
            let want = parse(&t, "X0^5", 1).scale(&t, b).sub(&t, &parse(&t, "Y0^5", 1).scale(&t, a)).unwrap();
            assert_eq!(got, want);
        }
        assert_eq!(NablaOp::new(0, 2, 3).apply(&t, 0, &th).unwrap(), th);
    }

    #[test]
    fn eval_row_matches_apply() {
        let t = Tower::new(3, 2).unwrap();
        let dir = (t.fq()[4], t.fq()[7]);
        for r in 0..7 {
            for k in 0..4 {
                for i in 0..=r {
                    let mono = MultiPoly::monomial(&[r], &[i], 1);
                    let d = NablaOp::new(0, dir.0, dir.1).apply(&t, k, &mono).unwrap();
                    let pt = (t.fq()[5], t.fq()[2]);
                    assert_eq!(nabla_eval_row(&t, r, k, dir, pt)[i], d.evaluate(&t, &[pt]).unwrap());
                }
            }
        }
    }

    #[test]
    fn serre_basics() {
        let t = Tower::new(5, 1).unwrap();
        let th = parse(&t, "X0^5*Y0-X0*Y0^5", 1);
        assert!(serre_apply(&t, SerreOp::Classical, &th).unwrap().is_zero());
        let m = parse(&t, "X0^4*Y0^3", 1);
        let want = parse(&t, "4*X0^8*Y0^3+3*X0^4*Y0^7", 1);
        assert_eq!(serre_apply(&t, SerreOp::Classical, &m).unwrap(), want);
        let g = Group::new(&t).unwrap();
        for x in g.elements().iter().step_by(7) {
            let lhs = serre_apply(&t, SerreOp::Classical, &m.substitute_linear(&t, x).unwrap()).unwrap();
            let rhs = serre_apply(&t, SerreOp::Classical, &m).unwrap().substitute_linear(&t, x).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn twisted_operators() {
        let t = Tower::new(3, 2).unwrap();
        let d0 = serre_apply(&t, SerreOp::Twisted(0), &parse(&t, "X0^2", 2)).unwrap();
        assert_eq!(d0, parse(&t, "2*X0^4*X1^2", 2));
        let d1 = serre_apply(&t, SerreOp::Twisted(1), &parse(&t, "X0*Y1^3", 2)).unwrap();
        assert!(d1.is_zero());
        let d1 = serre_apply(&t, SerreOp::Twisted(1), &parse(&t, "X0*X1^2*Y1", 2)).unwrap();
        assert_eq!(d1, parse(&t, "2*X0^4*X1*Y1+X0*Y0^3*X1^2", 2));
        assert!(matches!(
            serre_apply(&t, SerreOp::Twisted(0), &parse(&t, "X0*X1", 2)),
            Err(Error::ProfileOverflow { .. })
        ));
        assert_eq!(dj_domain(3, 2, 2, 1), vec![1, 3]);
    }

    #[test]
    fn defect_vanishes_on_diagonal_and_weyl() {
        let t = Tower::new(3, 2).unwrap();
        let z = t.fq()[4];
        let diag = GroupElem::new(&t, z, 0, 0, 1).unwrap();
        for j in 0..2 {
            let dom = dj_domain(3, 2, 2, j);
            for idx in 0..crate::poly::profile_dim(&dom) {
                let b = MultiPoly::basis(&dom, idx);
                assert!(dj_equivariance_defect(&t, j, &diag, &b).unwrap().is_zero());
                assert!(dj_equivariance_defect(&t, j, &GroupElem::weyl(), &b).unwrap().is_zero());
            }
        }
    }
}
