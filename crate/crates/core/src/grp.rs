//! GL₂(F_q): elements, enumeration, the Borel and torus subgroups, and
//! coset representatives for both.

use crate::error::{Error, Result};
use crate::gf::{Fe, Level, Tower};
use serde::Serialize;

/// Invertible 2×2 matrix (a b; c d) with entries in F_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupElem {
    pub a: Fe,
    pub b: Fe,
    pub c: Fe,
    pub d: Fe,
}

/// Which subgroup an element is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SubgroupTag {
    Borel,
    Torus,
    Full,
}

impl GroupElem {
    /// Build from F_q entries; the determinant must be nonzero.
    pub fn new(t: &Tower, a: Fe, b: Fe, c: Fe, d: Fe) -> Result<GroupElem> {
        for x in [a, b, c, d] {
            if !t.in_level(x, Level::Mid) {
                return Err(Error::LevelMismatch(format!("matrix entry {} is not in F_q", t.fmt(x))));
            }
        }
        let g = GroupElem { a, b, c, d };
        if g.det(t) == 0 {
            return Err(Error::ZeroElement);
        }
        Ok(g)
    }

    pub const fn identity() -> GroupElem {
        GroupElem { a: 1, b: 0, c: 0, d: 1 }
    }

    /// The Weyl element (0 1; 1 0).
    pub const fn weyl() -> GroupElem {
        GroupElem { a: 0, b: 1, c: 1, d: 0 }
    }

    pub fn det(&self, t: &Tower) -> Fe {
        t.sub(t.mul(self.a, self.d), t.mul(self.b, self.c))
    }

    pub fn mul(&self, t: &Tower, o: &GroupElem) -> GroupElem {
        GroupElem {
            a: t.add(t.mul(self.a, o.a), t.mul(self.b, o.c)),
            b: t.add(t.mul(self.a, o.b), t.mul(self.b, o.d)),
            c: t.add(t.mul(self.c, o.a), t.mul(self.d, o.c)),
            d: t.add(t.mul(self.c, o.b), t.mul(self.d, o.d)),
        }
    }

    pub fn inv(&self, t: &Tower) -> GroupElem {
        let di = t.inv(self.det(t)).expect("group elements are invertible");
        GroupElem {
            a: t.mul(self.d, di),
            b: t.neg(t.mul(self.b, di)),
            c: t.neg(t.mul(self.c, di)),
            d: t.mul(self.a, di),
        }
    }

    /// Entrywise Frobenius x ↦ x^{p^j}.
    pub fn frob(&self, t: &Tower, j: usize) -> GroupElem {
        GroupElem {
            a: t.frobenius(self.a, j as i64),
            b: t.frobenius(self.b, j as i64),
            c: t.frobenius(self.c, j as i64),
            d: t.frobenius(self.d, j as i64),
        }
    }

    pub fn is_borel(&self) -> bool {
        self.c == 0
    }

    /// Text form "[[a,b],[c,d]]".
    pub fn fmt(&self, t: &Tower) -> String {
        format!("[[{},{}],[{},{}]]", t.fmt(self.a), t.fmt(self.b), t.fmt(self.c), t.fmt(self.d))
    }

    /// Parse "[[a,b],[c,d]]"; entries are integers or F_q coordinate vectors.
    pub fn parse(t: &Tower, s: &str) -> Result<GroupElem> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix("[[")
            .and_then(|x| x.strip_suffix("]]"))
            .ok_or_else(|| Error::Parse(format!("matrix must look like [[a,b],[c,d]], got {s:?}")))?;
        let rows: Vec<&str> = inner.split("],[").collect();
        if rows.len() != 2 {
            return Err(Error::Parse(format!("matrix needs two rows: {s:?}")));
        }
        let mut entries = Vec::new();
        for row in rows {
            entries.extend(split_entries(row)?.into_iter().map(|e| t.parse(&e)).collect::<Result<Vec<_>>>()?);
        }
        if entries.len() != 4 {
            return Err(Error::Parse(format!("matrix needs four entries: {s:?}")));
        }
        GroupElem::new(t, entries[0], entries[1], entries[2], entries[3])
    }
}

// Split "x,[1,2]" at top-level commas.
fn split_entries(row: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in row.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch)
            }
            ']' => {
                depth -= 1;
                cur.push(ch)
            }
            ',' if depth == 0 => out.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    out.push(cur);
    if depth != 0 || out.len() != 2 {
        return Err(Error::Parse(format!("bad matrix row {row:?}")));
    }
    Ok(out)
}

/// Torus coset data: representatives of T\G and the factorization table.
#[derive(Debug, Clone)]
struct TorusData {
    reps: Vec<GroupElem>,
    /// For each group index: (x ∈ F_{q²}^*, rep index) with g = embed(x)·rep.
    factor: Vec<(Fe, u32)>,
}

/// The full group GL₂(F_q), enumerated, with coset bookkeeping.
#[derive(Debug, Clone)]
pub struct Group {
    q: usize,
    elems: Vec<GroupElem>,
    index: Vec<u32>,
    borel_reps: Vec<GroupElem>,
    torus: Option<TorusData>,
}

/// Embed x = u + vα ∈ F_{q²}^* as (u vα²; v u).
pub fn torus_embed(t: &Tower, x: Fe) -> Result<GroupElem> {
    if x == 0 {
        return Err(Error::ZeroElement);
    }
    let a = t.alpha()?;
    let (u, v) = t.decompose(x)?;
    Ok(GroupElem { a: u, b: t.mul(v, t.mul(a, a)), c: v, d: u })
}

impl Group {
    pub fn new(t: &Tower) -> Result<Group> {
        let q = t.q() as u64;
        let max = crate::gf::max_q();
        if q > max {
            return Err(Error::TooLarge { q, max });
        }
        let q = q as usize;
        let fq = t.fq();
        let mut elems = Vec::with_capacity((q * q - 1) * (q * q - q));
        let mut index = vec![u32::MAX; q * q * q * q];
        for (ia, &a) in fq.iter().enumerate() {
            for (ib, &b) in fq.iter().enumerate() {
                for (ic, &c) in fq.iter().enumerate() {
                    for (id, &d) in fq.iter().enumerate() {
                        let g = GroupElem { a, b, c, d };
                        if g.det(t) != 0 {
                            index[((ia * q + ib) * q + ic) * q + id] = elems.len() as u32;
                            elems.push(g);
                        }
                    }
                }
            }
        }
        let mut borel_reps: Vec<GroupElem> = fq.iter().map(|&c| GroupElem { a: 1, b: 0, c, d: 1 }).collect();
        borel_reps.push(GroupElem::weyl());
        let mut grp = Group { q, elems, index, borel_reps, torus: None };
        if t.alpha().is_ok() {
            grp.torus = Some(grp.build_torus(t)?);
        }
        Ok(grp)
    }

    fn build_torus(&self, t: &Tower) -> Result<TorusData> {
        let units: Vec<Fe> = t.elements(Level::Top).into_iter().filter(|&x| x != 0).collect();
        let embedded: Vec<(Fe, GroupElem)> =
            units.iter().map(|&x| Ok((x, torus_embed(t, x)?))).collect::<Result<_>>()?;
        let mut factor = vec![(0, u32::MAX); self.elems.len()];
        let mut reps = Vec::new();
        for g in &self.elems {
            let gi = self.idx(t, g);
            if factor[gi].1 != u32::MAX {
                continue;
            }
            let ri = reps.len() as u32;
            reps.push(*g);
            for (x, e) in &embedded {
                let h = e.mul(t, g);
                factor[self.idx(t, &h)] = (*x, ri);
            }
        }
        Ok(TorusData { reps, factor })
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// All elements in enumeration order (entries a, b, c, d, a slowest).
    pub fn elements(&self) -> &[GroupElem] {
        &self.elems
    }

    /// Position of g in the enumeration.
    pub fn idx(&self, t: &Tower, g: &GroupElem) -> usize {
        let q = self.q;
        let f = |x: Fe| t.fq_index(x).expect("entries lie in F_q");
        self.index[((f(g.a) * q + f(g.b)) * q + f(g.c)) * q + f(g.d)] as usize
    }

    /// Upper triangular elements.
    pub fn borel(&self) -> Vec<GroupElem> {
        self.elems.iter().copied().filter(|g| g.is_borel()).collect()
    }

    /// Representatives of B\G: (1 0; c 1) for c ∈ F_q, then the Weyl element.
    pub fn borel_coset_reps(&self) -> &[GroupElem] {
        &self.borel_reps
    }

    /// Unique factorization g = b·rep with b upper triangular.
    pub fn factor_borel(&self, t: &Tower, g: &GroupElem) -> (GroupElem, usize) {
        if g.d != 0 {
            let lam = t.div(g.c, g.d).expect("d is nonzero");
            let rep = t.fq_index(lam).expect("λ ∈ F_q");
            let b = GroupElem { a: t.sub(g.a, t.mul(g.b, lam)), b: g.b, c: 0, d: g.d };
            (b, rep)
        } else {
            (GroupElem { a: g.b, b: g.a, c: 0, d: g.c }, self.q)
        }
    }

    /// Generators: diag(ζ, 1), the Weyl element and (1 1; 0 1).
    pub fn generators(&self, t: &Tower) -> Vec<GroupElem> {
        let order = (self.q - 1) as u64;
        let zeta = *t
            .fq()
            .iter()
            .find(|&&x| x != 0 && (1..order).all(|k| order % k != 0 || t.pow(x, k) != 1))
            .expect("F_q^* is cyclic");
        vec![GroupElem { a: zeta, b: 0, c: 0, d: 1 }, GroupElem::weyl(), GroupElem { a: 1, b: 1, c: 0, d: 1 }]
    }

    fn torus_data(&self) -> Result<&TorusData> {
        self.torus.as_ref().ok_or(Error::EvenCharacteristic)
    }

    /// Representatives of T\G in enumeration order of their first element.
    pub fn torus_coset_reps(&self) -> Result<&[GroupElem]> {
        Ok(&self.torus_data()?.reps)
    }

    /// Unique factorization g = embed(x)·rep, returning (x, rep index).
    pub fn factor_torus(&self, t: &Tower, g: &GroupElem) -> Result<(Fe, usize)> {
        let d = self.torus_data()?;
        let (x, r) = d.factor[self.idx(t, g)];
        Ok((x, r as usize))
    }

    /// Subgroup membership test.
    pub fn contains(&self, t: &Tower, tag: SubgroupTag, g: &GroupElem) -> bool {
        match tag {
            SubgroupTag::Full => true,
            SubgroupTag::Borel => g.is_borel(),
            SubgroupTag::Torus => match t.alpha() {
                Ok(a) => g.a == g.d && g.b == t.mul(g.c, t.mul(a, a)),
                Err(_) => false,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        for (p, f, n) in [(2u64, 1usize, 6usize), (3, 1, 48), (5, 1, 480)] {
            let t = Tower::new(p, f).unwrap();
            let g = Group::new(&t).unwrap();
            assert_eq!(g.order(), n);
            let q = t.q() as usize;
            assert_eq!(n, (q * q - 1) * (q * q - q));
        }
    }

    #[test]
    fn borel_factorization_is_unique() {
        let t = Tower::new(3, 1).unwrap();
        let g = Group::new(&t).unwrap();
        assert_eq!(g.borel().len(), 12);
        assert_eq!(g.borel_coset_reps().len(), 4);
        let mut seen = std::collections::HashSet::new();
        for x in g.elements() {
            let (b, r) = g.factor_borel(&t, x);
            assert!(b.is_borel());
            assert_eq!(b.mul(&t, &g.borel_coset_reps()[r]), *x);
            seen.insert((b, r));
        }
        assert_eq!(seen.len(), 48);
        let (b, r) = g.factor_borel(&t, &GroupElem::weyl());
        assert_eq!((b, r), (GroupElem::identity(), 3));
    }

    #[test]
    fn torus_embedding() {
        let t = Tower::new(5, 1).unwrap();
        let a = t.alpha().unwrap();
        assert_eq!(torus_embed(&t, 1).unwrap(), GroupElem::identity());
        assert_eq!(torus_embed(&t, a).unwrap(), GroupElem { a: 0, b: t.mul(a, a), c: 1, d: 0 });
        assert_eq!(torus_embed(&t, 0), Err(Error::ZeroElement));
        let units: Vec<Fe> = t.elements(Level::Top).into_iter().filter(|&x| x != 0).collect();
        for &x in &units {
            let e = torus_embed(&t, x).unwrap();
            assert_eq!(e.det(&t), t.norm(x));
            for &y in units.iter().step_by(3) {
                assert_eq!(torus_embed(&t, t.mul(x, y)).unwrap(), e.mul(&t, &torus_embed(&t, y).unwrap()));
            }
        }
    }

    #[test]
    fn torus_cosets_partition() {
        for p in [3u64, 5] {
            let t = Tower::new(p, 1).unwrap();
            let g = Group::new(&t).unwrap();
            let reps = g.torus_coset_reps().unwrap();
            assert_eq!(reps.len(), (p * p - p) as usize);
            for x in g.elements() {
                let (u, r) = g.factor_torus(&t, x).unwrap();
                assert_eq!(torus_embed(&t, u).unwrap().mul(&t, &reps[r]), *x);
            }
        }
        let t2 = Tower::new(2, 1).unwrap();
        assert_eq!(Group::new(&t2).unwrap().torus_coset_reps().unwrap_err(), Error::EvenCharacteristic);
    }

    #[test]
    fn parse_and_print() {
        let t = Tower::new(3, 2).unwrap();
        let g = GroupElem::parse(&t, "[[0,1],[1,0]]").unwrap();
        assert_eq!(g, GroupElem::weyl());
        let h = GroupElem::parse(&t, "[[[0,1],0],[0,1]]").unwrap();
        assert_eq!(GroupElem::parse(&t, &h.fmt(&t)).unwrap(), h);
        assert!(GroupElem::parse(&t, "[[1,1],[1,1]]").is_err());
    }

    #[test]
    fn generators_generate() {
        let t = Tower::new(3, 2).unwrap();
        let g = Group::new(&t).unwrap();
        let gens = g.generators(&t);
        let mut seen = vec![false; g.order()];
        let mut stack = vec![GroupElem::identity()];
        seen[g.idx(&t, &GroupElem::identity())] = true;
        while let Some(x) = stack.pop() {
            for s in &gens {
                let y = x.mul(&t, s);
                let i = g.idx(&t, &y);
                if !seen[i] {
                    seen[i] = true;
                    stack.push(y);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }
}
