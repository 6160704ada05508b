//! Representation spaces: tensor products of Frobenius-twisted symmetric
//! powers, spaces induced from the Borel subgroup or the anisotropic torus,
//! the distinguished bases of induced spaces, exact linear maps, and the
//! equivariance engine shared by every comparison map.
//!
//! An induced function F satisfies F(hg) = σ(h)F(g) and is stored as its
//! values on fixed coset representatives, rep-major then fiber coordinate.
//! G acts by right translation, (g·F)(γ) = F(γg).

use crate::error::{Error, Result};
use crate::gf::{binom_mod, Fe, Tower};
use crate::grp::{torus_embed, Group, GroupElem};
use crate::linalg::{Matrix, Subspace};
use crate::poly::{apply_slot_matrices, profile_dim, slot_matrix, MultiPoly, Profile};
use rayon::prelude::*;
use serde::Serialize;

/// ⊗_k V_{r_k}^{Fr^{j_k}} ⊗ det^k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymRep {
    /// (degree, Frobenius power) per tensor factor; factor 0 is fastest in coordinates.
    pub factors: Vec<(usize, usize)>,
    pub det_twist: u64,
}

impl SymRep {
    /// ⊗_j V_{r_j}^{Fr^j}.
    pub fn twisted(profile: &[usize]) -> SymRep {
        SymRep { factors: profile.iter().enumerate().map(|(j, &r)| (r, j)).collect(), det_twist: 0 }
    }

    pub fn with_det(mut self, k: u64) -> SymRep {
        self.det_twist = k;
        self
    }

    /// Tensor product, factors of `self` first.
    pub fn tensor(&self, other: &SymRep) -> SymRep {
        let mut factors = self.factors.clone();
        factors.extend(&other.factors);
        SymRep { factors, det_twist: self.det_twist + other.det_twist }
    }

    pub fn profile(&self) -> Profile {
        self.factors.iter().map(|&(r, _)| r).collect()
    }

    pub fn dim(&self) -> usize {
        profile_dim(&self.profile())
    }

    fn slot_mats(&self, t: &Tower, g: &GroupElem) -> Vec<Matrix> {
        self.factors.iter().map(|&(r, j)| slot_matrix(t, &g.frob(t, j), r)).collect()
    }

    /// det(g)^k · (twisted substitution of g).
    pub fn act(&self, t: &Tower, g: &GroupElem, poly: &MultiPoly) -> Result<MultiPoly> {
        let prof = self.profile();
        if poly.profile() != prof.as_slice() {
            return Err(Error::ProfileMismatch { expected: prof, got: poly.profile().to_vec() });
        }
        let v = apply_slot_matrices(t, &self.slot_mats(t, g), &prof, poly.coeffs());
        let s = t.pow(g.det(t), self.det_twist);
        MultiPoly::from_coeffs(&prof, v.into_iter().map(|x| t.mul(x, s)).collect())
    }

    /// Full action matrix ρ(g).
    pub fn matrix(&self, t: &Tower, g: &GroupElem) -> Matrix {
        let mats = self.slot_mats(t, g);
        let mut m = Matrix::identity(1);
        for s in &mats {
            m = s.kron(t, &m);
        }
        m.scale(t, t.pow(g.det(t), self.det_twist))
    }
}

/// The inducing datum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Datum {
    /// ⊗_j V_{m_j}^{Fr^j} ⊗ d^e on B.
    BorelSym { m: Profile, e: u64 },
    /// The split datum (a·d^{r−1}) ⊕ d^r on B.
    BorelSplit { r: u64 },
    /// V_m restricted to T, tensored with ω^e (m = 0 gives a character).
    Torus { m: usize, e: u64 },
}

/// Fiber action of an upper triangular b on V_m^{Fr^j}, in the coordinates
/// used by the principal series maps: entry (i, n) = C(n,i) u^{m−n} v^{n−i} z^i.
pub fn borel_fiber_slot(t: &Tower, b: &GroupElem, m: usize) -> Matrix {
    let (u, v, z) = (b.a, b.b, b.d);
    let mut s = Matrix::zeros(m + 1, m + 1);
    for n in 0..=m {
        for i in 0..=n {
            let c = binom_mod(n as u64, i as u64, t.p());
            let x = [t.pow(u, (m - n) as u64), t.pow(v, (n - i) as u64), t.pow(z, i as u64)]
                .into_iter()
                .fold(c, |a, w| t.mul(a, w));
            s.set(i, n, x);
        }
    }
    s
}

/// An induced space ind_H^G σ with fixed coset representatives.
#[derive(Clone, Debug)]
pub struct InducedSpace {
    pub datum: Datum,
    reps: Vec<GroupElem>,
    fiber_dim: usize,
}

impl InducedSpace {
    pub fn new(t: &Tower, grp: &Group, datum: Datum) -> Result<InducedSpace> {
        let (reps, fiber_dim) = match &datum {
            Datum::BorelSym { m, .. } => (grp.borel_coset_reps().to_vec(), profile_dim(m)),
            Datum::BorelSplit { .. } => (grp.borel_coset_reps().to_vec(), 2),
            Datum::Torus { m, .. } => {
                t.alpha()?;
                (grp.torus_coset_reps()?.to_vec(), m + 1)
            }
        };
        Ok(InducedSpace { datum, reps, fiber_dim })
    }

    pub fn reps(&self) -> &[GroupElem] {
        &self.reps
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    /// [G:H] · dim σ.
    pub fn dim(&self) -> usize {
        self.reps.len() * self.fiber_dim
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.datum, Datum::Torus { .. })
    }

    /// σ(b) for b ∈ B.
    fn sigma_borel(&self, t: &Tower, b: &GroupElem) -> Matrix {
        match &self.datum {
            Datum::BorelSym { m, e } => {
                let mut out = Matrix::identity(1);
                for (j, &mj) in m.iter().enumerate() {
                    out = borel_fiber_slot(t, &b.frob(t, j), mj).kron(t, &out);
                }
                out.scale(t, t.pow(b.d, *e))
            }
            Datum::BorelSplit { r } => {
                let mut s = Matrix::zeros(2, 2);
                s.set(0, 0, t.mul(b.a, t.pow(b.d, r - 1)));
                s.set(1, 1, t.pow(b.d, *r));
                s
            }
            Datum::Torus { .. } => unreachable!("Borel datum expected"),
        }
    }

    /// σ(embed(x)) for x ∈ F_{q²}^*.
    fn sigma_torus(&self, t: &Tower, x: Fe) -> Result<Matrix> {
        match &self.datum {
            Datum::Torus { m, e } => {
                let g = torus_embed(t, x)?;
                Ok(slot_matrix(t, &g, *m).scale(t, t.pow(x, *e)))
            }
            _ => unreachable!("torus datum expected"),
        }
    }

    /// Write g = h·rep and return (σ(h), rep index).
    pub fn factor(&self, t: &Tower, grp: &Group, g: &GroupElem) -> Result<(Matrix, usize)> {
        if self.is_torus() {
            let (x, i) = grp.factor_torus(t, g)?;
            Ok((self.sigma_torus(t, x)?, i))
        } else {
            let (b, i) = grp.factor_borel(t, g);
            Ok((self.sigma_borel(t, &b), i))
        }
    }

    /// Every element of H with σ(h).
    pub fn subgroup(&self, t: &Tower, grp: &Group) -> Result<Vec<(GroupElem, Matrix)>> {
        if self.is_torus() {
            t.elements(crate::gf::Level::Top)
                .into_iter()
                .filter(|&x| x != 0)
                .map(|x| Ok((torus_embed(t, x)?, self.sigma_torus(t, x)?)))
                .collect()
        } else {
            Ok(grp.borel().into_iter().map(|b| (b, self.sigma_borel(t, &b))).collect())
        }
    }

    /// F(g) for a stored function F.
    pub fn value_at(&self, t: &Tower, grp: &Group, func: &[Fe], g: &GroupElem) -> Result<Vec<Fe>> {
        let (s, i) = self.factor(t, grp, g)?;
        let k = self.fiber_dim;
        Ok(s.mul_vec(t, &func[i * k..(i + 1) * k]))
    }

    /// Right translation by g.
    pub fn act(&self, t: &Tower, grp: &Group, g: &GroupElem, func: &[Fe]) -> Result<Vec<Fe>> {
        let mut out = Vec::with_capacity(func.len());
        for rep in &self.reps {
            out.extend(self.value_at(t, grp, func, &rep.mul(t, g))?);
        }
        Ok(out)
    }

    /// Matrix of right translation by g in the stored coordinates.
    pub fn action_matrix(&self, t: &Tower, grp: &Group, g: &GroupElem) -> Result<Matrix> {
        let k = self.fiber_dim;
        let mut m = Matrix::zeros(self.dim(), self.dim());
        for (row, rep) in self.reps.iter().enumerate() {
            let (s, i) = self.factor(t, grp, &rep.mul(t, g))?;
            for a in 0..k {
                for b in 0..k {
                    m.set(row * k + a, i * k + b, s.get(a, b));
                }
            }
        }
        Ok(m)
    }

    /// Restrict a function given on all of G to the representatives, after
    /// checking F(hg) = σ(h)F(g) for every h and g.
    pub fn from_function(
        &self,
        t: &Tower,
        grp: &Group,
        func: impl Fn(&GroupElem) -> Vec<Fe> + Sync,
    ) -> Result<Option<Vec<Fe>>> {
        let hs = self.subgroup(t, grp)?;
        let ok = grp.elements().par_iter().all(|g| {
            let fg = func(g);
            hs.iter().all(|(h, s)| func(&h.mul(t, g)) == s.mul_vec(t, &fg))
        });
        if !ok {
            return Ok(None);
        }
        Ok(Some(self.reps.iter().flat_map(|r| func(r)).collect()))
    }
}

/// f_i(g) = A^{e+q²−1−i} B^i with (A, B) = (a + cα, b + dα).
pub fn torus_fi_value(t: &Tower, e: u64, i: u64, g: &GroupElem) -> Result<Fe> {
    let al = t.alpha()?;
    let q2 = t.q2() as u64;
    if i > e + q2 - 1 {
        return Err(Error::IndexOutOfRange { index: i as usize, max: (e + q2 - 1) as usize });
    }
    let a = t.add(g.a, t.mul(g.c, al));
    let b = t.add(g.b, t.mul(g.d, al));
    Ok(t.mul(t.pow(a, e + q2 - 1 - i), t.pow(b, i)))
}

/// f_i materialized on the torus coset representatives.
pub fn torus_fi(t: &Tower, grp: &Group, e: u64, i: u64) -> Result<Vec<Fe>> {
    grp.torus_coset_reps()?.iter().map(|g| torus_fi_value(t, e, i, g)).collect()
}

/// Coordinates of f_i in the basis B_q = {f_0, …, f_{q²−q−1}}.
pub fn flipflop_reduce(t: &Tower, e: u64, i: u64) -> Result<Vec<Fe>> {
    let q = t.q() as u64;
    let q2 = q * q;
    if i > e + q2 - 1 {
        return Err(Error::IndexOutOfRange { index: i as usize, max: (e + q2 - 1) as usize });
    }
    let n = (q2 - q) as usize;
    let mut out = vec![0; n];
    // flip: f_{q²−1+j} = f_j
    let i = i % (q2 - 1);
    if i < q2 - q {
        out[i as usize] = 1;
    } else {
        // flop: f_{q²−q+j} = −Σ_{k<q} f_{j+k(q−1)}
        let j = i - (q2 - q);
        for k in 0..q {
            out[(j + k * (q - 1)) as usize] = t.neg(1);
        }
    }
    Ok(out)
}

/// The basis {f_0, …, f_{q−1}, φ} of ind_B^G d^e on the Borel representatives.
///
/// f_i(g) = (−d/c)^i c^e for c ≠ 0 and 0 otherwise; φ is supported on B with φ(b) = d^e.
pub fn borel_basis(t: &Tower, grp: &Group, e: u64) -> Vec<Vec<Fe>> {
    let q = t.q() as usize;
    let value = |i: Option<usize>, g: &GroupElem| -> Fe {
        match i {
            Some(i) if g.c != 0 => {
                let ratio = t.neg(t.div(g.d, g.c).expect("c ≠ 0"));
                t.mul(t.pow(ratio, i as u64), t.pow(g.c, e))
            }
            Some(_) => 0,
            None if g.c == 0 => t.pow(g.d, e),
            None => 0,
        }
    };
    let reps = grp.borel_coset_reps();
    (0..q).map(Some).chain([None]).map(|i| reps.iter().map(|g| value(i, g)).collect()).collect()
}

/// Exact matrix between finite-dimensional spaces with named bases.
#[derive(Clone, Debug)]
pub struct LinearMap {
    pub domain: Vec<String>,
    pub codomain: Vec<String>,
    pub matrix: Matrix,
}

/// JSON summary of a linear map.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LinearMapSummary {
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
}

impl LinearMap {
    /// Matrix whose columns are the images of the domain basis vectors.
    pub fn as_matrix(domain_dim: usize, codomain_dim: usize, image: impl Fn(usize) -> Vec<Fe>) -> LinearMap {
        let cols: Vec<Vec<Fe>> = (0..domain_dim).map(image).collect();
        LinearMap {
            domain: (0..domain_dim).map(|i| format!("e{i}")).collect(),
            codomain: (0..codomain_dim).map(|i| format!("e{i}")).collect(),
            matrix: Matrix::from_cols(&cols, codomain_dim),
        }
    }

    pub fn from_matrix(matrix: Matrix) -> LinearMap {
        LinearMap {
            domain: (0..matrix.cols).map(|i| format!("e{i}")).collect(),
            codomain: (0..matrix.rows).map(|i| format!("e{i}")).collect(),
            matrix,
        }
    }

    pub fn rank(&self, t: &Tower) -> usize {
        self.matrix.rank(t)
    }

    pub fn kernel_basis(&self, t: &Tower) -> Subspace {
        self.matrix.kernel(t)
    }

    pub fn is_isomorphism(&self, t: &Tower) -> bool {
        self.matrix.rows == self.matrix.cols && self.rank(t) == self.matrix.cols
    }

    pub fn summary(&self, t: &Tower, with_matrix: bool) -> LinearMapSummary {
        let rank = self.rank(t);
        LinearMapSummary {
            domain_dim: self.matrix.cols,
            codomain_dim: self.matrix.rows,
            rank,
            kernel_dim: self.matrix.cols - rank,
            matrix: with_matrix
                .then(|| (0..self.matrix.rows).map(|i| self.matrix.row(i).iter().map(|&x| t.fmt(x)).collect()).collect()),
        }
    }
}

/// Outcome of the three-part equivariance certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivarianceCert {
    /// M_g = M_e ρ(g) for every g.
    pub g_linear: bool,
    /// M_h = σ(h) M_e for every h in the inducing subgroup.
    pub h_linear: bool,
    /// ρ(gh) = ρ(g)ρ(h) on generators × all of G.
    pub homomorphism: bool,
}

impl EquivarianceCert {
    pub fn pass(&self) -> bool {
        self.g_linear && self.h_linear && self.homomorphism
    }
}

/// A linear map V → ind_H^G σ presented by its evaluations P ↦ ψ_P(g).
///
/// Equivariance of the induced map is equivalent to the three conditions in
/// [`EquivarianceCert`]: they give L(h·P)(γ) = ψ_P(γh) = σ(b)ψ_P(γ′) where γh = bγ′.
pub struct Presentation<'a> {
    pub domain: &'a SymRep,
    pub space: &'a InducedSpace,
    /// Fiber-valued evaluation matrix at g (fiber_dim × dim V).
    pub at: Box<dyn Fn(&GroupElem) -> Matrix + Sync + 'a>,
}

impl<'a> Presentation<'a> {
    /// The induced map, stacked over the coset representatives.
    pub fn matrix(&self) -> Matrix {
        let blocks: Vec<Matrix> = self.space.reps().iter().map(|g| (self.at)(g)).collect();
        Matrix::vstack(&blocks)
    }

    pub fn linear_map(&self) -> LinearMap {
        LinearMap::from_matrix(self.matrix())
    }

    /// Exhaustive certificate over G and H.
    pub fn certify(&self, t: &Tower, grp: &Group) -> Result<EquivarianceCert> {
        let me = (self.at)(&GroupElem::identity());
        let g_linear = grp.elements().par_iter().all(|g| (self.at)(g) == me.mul(t, &self.domain.matrix(t, g)));
        let hs = self.space.subgroup(t, grp)?;
        let h_linear = hs.par_iter().all(|(h, s)| (self.at)(h) == s.mul(t, &me));
        let gens = grp.generators(t);
        // Checked factor by factor: a Kronecker product of homomorphisms is one.
        let homomorphism = grp.elements().par_iter().all(|g| {
            let rg = self.domain.slot_mats(t, g);
            gens.iter().all(|s| {
                let rs = self.domain.slot_mats(t, s);
                let rgs = self.domain.slot_mats(t, &g.mul(t, s));
                rgs.iter().zip(rg.iter().zip(&rs)).all(|(x, (a, b))| *x == a.mul(t, b))
            })
        });
        Ok(EquivarianceCert { g_linear, h_linear, homomorphism })
    }

    /// Literal check L(g·v) = g·L(v) on every basis vector, for the given g.
    pub fn literal_check(&self, t: &Tower, grp: &Group, elems: &[GroupElem]) -> Result<bool> {
        let l = self.matrix();
        let dim = self.domain.dim();
        let results: Vec<Result<bool>> = elems
            .par_iter()
            .map(|g| {
                let rg = self.domain.matrix(t, g);
                for v in 0..dim {
                    let lhs = l.mul_vec(t, &rg.col(v));
                    let rhs = self.space.act(t, grp, g, &l.col(v))?;
                    if lhs != rhs {
                        return Ok(false);
                    }
                }
                Ok(true)
            })
            .collect();
        for r in results {
            if !r? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Literal equivariance of an explicit matrix L: V → ind, over all of G.
pub fn check_equivariance(t: &Tower, grp: &Group, l: &LinearMap, dom: &SymRep, cod: &InducedSpace) -> Result<bool> {
    let q = t.q() as u64;
    if q > 9 {
        return Err(Error::TooLarge { q, max: 9 });
    }
    if l.matrix.cols != dom.dim() || l.matrix.rows != cod.dim() {
        return Ok(false);
    }
    let results: Vec<Result<bool>> = grp
        .elements()
        .par_iter()
        .map(|g| {
            let rg = dom.matrix(t, g);
            for v in 0..dom.dim() {
                if l.matrix.mul_vec(t, &rg.col(v)) != cod.act(t, grp, g, &l.matrix.col(v))? {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect();
    for r in results {
        if !r? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The action induced by ρ on V/W in the quotient coordinates of `sub` = W.
///
/// Only meaningful when W is stable under ρ.
pub fn quotient_action(t: &Tower, rho: &Matrix, sub: &Subspace) -> Matrix {
    let n = sub.ambient() - sub.dim();
    let cols: Vec<Vec<Fe>> = (0..n)
        .map(|k| {
            let mut e = vec![0; n];
            e[k] = 1;
            sub.quotient_coords(t, &rho.mul_vec(t, &sub.lift(&e)))
        })
        .collect();
    Matrix::from_cols(&cols, n)
}

/// The homogeneous linear system M·A(g) = B(g)·M, one block per pair, in
/// the unknowns of M (rows(B) × rows(A)) flattened row-major.
pub fn intertwiner_system(t: &Tower, a: &[Matrix], b: &[Matrix]) -> Matrix {
    let n = a[0].rows;
    let m = b[0].rows;
    let mut rows = Vec::new();
    for (ag, bg) in a.iter().zip(b) {
        for i in 0..m {
            for j in 0..n {
                let mut row = vec![0; m * n];
                // (M A)_{ij} = Σ_k M_{ik} A_{kj}
                for k in 0..n {
                    let x = ag.get(k, j);
                    if x != 0 {
                        row[i * n + k] = t.add(row[i * n + k], x);
                    }
                }
                // (B M)_{ij} = Σ_k B_{ik} M_{kj}
                for k in 0..m {
                    let x = bg.get(i, k);
                    if x != 0 {
                        row[k * n + j] = t.sub(row[k * n + j], x);
                    }
                }
                rows.push(row);
            }
        }
    }
    Matrix::from_rows(&rows, m * n)
}

/// Solve M·A(g) = B(g)·M over the generators; returns a basis of solutions.
pub fn intertwiners(t: &Tower, a: &[Matrix], b: &[Matrix]) -> Vec<Matrix> {
    let n = a[0].rows;
    let m = b[0].rows;
    intertwiner_system(t, a, b)
        .kernel(t)
        .basis()
        .iter()
        .map(|v| Matrix { rows: m, cols: n, data: v.clone() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Level;

    #[test]
    fn symrep_is_a_left_action() {
        let t = Tower::new(3, 2).unwrap();
        let grp = Group::new(&t).unwrap();
        let rep = SymRep::twisted(&[3, 2]).with_det(1);
        let p = MultiPoly::parse(&t, "X0^2*Y0*X1*Y1+[1,1]*Y0^3*Y1^2", 2).unwrap();
        let gs = grp.elements();
        for k in 0..20 {
            let (g, h) = (&gs[k * 131 % gs.len()], &gs[k * 977 % gs.len()]);
            let lhs = rep.act(&t, g, &rep.act(&t, h, &p).unwrap()).unwrap();
            let rhs = rep.act(&t, &g.mul(&t, h), &p).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(rep.matrix(&t, g).mul_vec(&t, p.coeffs()), rep.act(&t, g, &p).unwrap().coeffs());
        }
        let th = crate::theta::dickson(&Tower::new(3, 1).unwrap());
        let t3 = Tower::new(3, 1).unwrap();
        let g3 = Group::new(&t3).unwrap();
        for g in g3.elements() {
            let th2 = th.pow(&t3, 2);
            let rep2 = SymRep::twisted(th2.profile());
            assert_eq!(rep2.act(&t3, g, &th2).unwrap(), th2.scale(&t3, t3.pow(g.det(&t3), 2)));
        }
    }

    #[test]
    fn borel_fiber_is_a_representation() {
        let t = Tower::new(5, 1).unwrap();
        let grp = Group::new(&t).unwrap();
        let sp = InducedSpace::new(&t, &grp, Datum::BorelSym { m: vec![2], e: 20 }).unwrap();
        let hs = sp.subgroup(&t, &grp).unwrap();
        for (k, (h1, s1)) in hs.iter().enumerate().step_by(5) {
            let (h2, s2) = &hs[(k * 7 + 3) % hs.len()];
            let (s12, _) = sp.factor(&t, &grp, &h1.mul(&t, h2)).unwrap();
            assert_eq!(s12, s1.mul(&t, s2));
        }
        assert_eq!(sp.dim(), 18);
    }

    #[test]
    fn torus_basis_functions() {
        for p in [3u64, 5] {
            let t = Tower::new(p, 1).unwrap();
            let grp = Group::new(&t).unwrap();
            let e = 3;
            let sp = InducedSpace::new(&t, &grp, Datum::Torus { m: 0, e }).unwrap();
            let q2 = t.q2() as u64;
            let n = (q2 - t.q() as u64) as usize;
            assert_eq!(sp.dim(), n);
            // Equivariance of every f_i as a function on G.
            for i in [0u64, 1, 7, e + q2 - 1] {
                let f = sp.from_function(&t, &grp, |g| vec![torus_fi_value(&t, e, i, g).unwrap()]).unwrap();
                assert!(f.is_some());
            }
            // B_q is a basis.
            let cols: Vec<Vec<Fe>> = (0..n as u64).map(|i| torus_fi(&t, &grp, e, i).unwrap()).collect();
            assert_eq!(Matrix::from_cols(&cols, n).rank(&t), n);
            // Flip and flop agree with direct evaluation on all of G.
            for i in 0..=e + q2 - 1 {
                let c = flipflop_reduce(&t, e, i).unwrap();
                for g in grp.elements().iter().step_by(3) {
                    let direct = torus_fi_value(&t, e, i, g).unwrap();
                    let via = c.iter().enumerate().fold(0, |acc, (k, &x)| {
                        t.add(acc, t.mul(x, torus_fi_value(&t, e, k as u64, g).unwrap()))
                    });
                    assert_eq!(direct, via);
                }
            }
        }
        let t = Tower::new(3, 1).unwrap();
        assert_eq!(torus_fi_value(&t, 0, 0, &GroupElem::identity()).unwrap(), 1);
        assert_eq!(flipflop_reduce(&t, 2, 8).unwrap()[0], 1);
        assert_eq!(flipflop_reduce(&t, 2, 6).unwrap(), vec![2, 0, 2, 0, 2, 0]);
        assert!(flipflop_reduce(&t, 2, 11).is_err());
    }

    #[test]
    fn borel_basis_is_independent_and_equivariant() {
        let t = Tower::new(3, 2).unwrap();
        let grp = Group::new(&t).unwrap();
        let e = 4;
        let sp = InducedSpace::new(&t, &grp, Datum::BorelSym { m: vec![0, 0], e }).unwrap();
        let basis = borel_basis(&t, &grp, e);
        assert_eq!(Matrix::from_cols(&basis, sp.dim()).rank(&t), 10);
        // Compare with the defining formula at every g.
        for g in grp.elements().iter().step_by(11) {
            let v = sp.value_at(&t, &grp, &basis[2], g).unwrap()[0];
            let want = if g.c == 0 { 0 } else { t.mul(t.pow(t.neg(t.div(g.d, g.c).unwrap()), 2), t.pow(g.c, e)) };
            assert_eq!(v, want);
            let phi = sp.value_at(&t, &grp, &basis[9], g).unwrap()[0];
            assert_eq!(phi, if g.c == 0 { t.pow(g.d, e) } else { 0 });
        }
        assert!(t.in_level(basis[1][3], Level::Mid));
    }

    #[test]
    fn linear_map_basics() {
        let t = Tower::new(3, 1).unwrap();
        let id = LinearMap::from_matrix(Matrix::identity(4));
        assert!(id.is_isomorphism(&t));
        let z = LinearMap::from_matrix(Matrix::zeros(2, 4));
        assert_eq!(z.kernel_basis(&t).dim(), 4);
        let s = z.summary(&t, false);
        assert_eq!((s.rank, s.kernel_dim), (0, 4));
        let m = LinearMap::as_matrix(2, 2, |i| if i == 0 { vec![1, 2] } else { vec![2, 1] });
        assert_eq!(m.rank(&t), 1);
    }

    #[test]
    fn intertwiner_solver() {
        let t = Tower::new(3, 1).unwrap();
        let grp = Group::new(&t).unwrap();
        let rep = SymRep::twisted(&[2]);
        let gens = grp.generators(&t);
        let a: Vec<Matrix> = gens.iter().map(|g| rep.matrix(&t, g)).collect();
        let sols = intertwiners(&t, &a, &a);
        assert!(!sols.is_empty());
        for s in &sols {
            for g in grp.elements() {
                let r = rep.matrix(&t, g);
                assert_eq!(s.mul(&t, &r), r.mul(&t, s));
            }
        }
    }
}
