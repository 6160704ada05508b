//! Finite field tower F_p ⊂ F_q ⊂ F_{q²}.
//!
//! Every element of every level is stored as a code of the top field
//! F_{q²} = F_p[x]/(modulus_q2): the code of Σ c_i x^i is Σ c_i p^i. Elements
//! of F_p have codes 0..p, and F_q sits inside through an explicit embedding.
//! Multiplication uses exp/log tables and addition uses Zech logarithms.

use crate::error::{Error, Result};
use serde::Serialize;

/// Code of a field element in the top field of its tower.
pub type Fe = u32;

/// Default enumeration bound on q.
pub const DEFAULT_MAX_Q: u64 = 64;

const NONE: u32 = u32::MAX;

/// The three levels of the tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Level {
    Base,
    Mid,
    Top,
}

/// Exact arithmetic in F_p ⊂ F_q ⊂ F_{q²}.
#[derive(Debug, Clone)]
pub struct Tower {
    p: u32,
    f: usize,
    q: u32,
    q2: u32,
    modulus_q: Vec<u32>,
    modulus_q2: Vec<u32>,
    exp: Vec<Fe>,
    log: Vec<u32>,
    zech: Vec<u32>,
    neg: Vec<Fe>,
    mid_root: Fe,
    mid_elems: Vec<Fe>,
    mid_pos: Vec<u32>,
    top_elems: Vec<Fe>,
    alpha: Option<Fe>,
}

/// Bound on q, read from `MODREP_MAX_Q` when set.
pub fn max_q() -> u64 {
    std::env::var("MODREP_MAX_Q")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_Q)
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomials over F_p, little-endian, used only while building tables.

fn ptrim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn prem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = ptrim(a.to_vec());
    let b = ptrim(b.to_vec());
    let lead = *b.last().expect("division by zero polynomial");
    let lead_inv = modinv(lead, p);
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &bi) in b.iter().enumerate() {
            let t = (c as u64 * bi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        r = ptrim(r);
    }
    r
}

fn modinv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Little-endian digit vector of `idx` read with c0 as the most significant digit,
/// so that iterating idx walks coordinate vectors in lexicographic order.
fn lex_digits(idx: u32, p: u32, n: usize) -> Vec<u32> {
    let mut d = vec![0u32; n];
    let mut x = idx;
    for i in (0..n).rev() {
        d[i] = x % p;
        x /= p;
    }
    d
}

fn irreducible(poly: &[u32], p: u32) -> bool {
    let n = poly.len() - 1;
    if n == 1 {
        return true;
    }
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32) as u32;
        for idx in 0..count {
            let mut cand = lex_digits(idx, p, d);
            cand.push(1);
            if prem(poly, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible polynomial of degree n over F_p, comparing the
/// coefficient vector [c0, c1, ...] lexicographically.
pub fn least_irreducible(p: u32, n: usize) -> Vec<u32> {
    let count = (p as u64).pow(n as u32) as u32;
    for idx in 0..count {
        let mut cand = lex_digits(idx, p, n);
        cand.push(1);
        if irreducible(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn code_of(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn digits_of(code: u32, p: u32, n: usize) -> Vec<u32> {
    let mut d = Vec::with_capacity(n);
    let mut x = code;
    for _ in 0..n {
        d.push(x % p);
        x /= p;
    }
    d
}

impl Tower {
    /// Build the tower for (p, f). Moduli are the lexicographically least
    /// irreducible monic polynomials; alpha is set iff p is odd.
    pub fn new(p: u64, f: usize) -> Result<Tower> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if f == 0 {
            return Err(Error::RangeError("f must be at least 1".into()));
        }
        let q = p.checked_pow(f as u32).unwrap_or(u64::MAX);
        let max = max_q();
        if q > max || q > 4096 {
            return Err(Error::TooLarge { q, max });
        }
        let p = p as u32;
        let q = q as u32;
        let n = 2 * f;
        let q2 = q * q;
        let modulus_q = least_irreducible(p, f);
        let modulus_q2 = least_irreducible(p, n);

        // Multiplication by polynomial reduction, only for table construction.
        let mulslow = |a: u32, b: u32| -> u32 {
            let da = digits_of(a, p, n);
            let db = digits_of(b, p, n);
            let mut prod = vec![0u32; 2 * n];
            for (i, &x) in da.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let r = prem(&prod, &modulus_q2, p);
            code_of(&r, p)
        };

        let top_elems: Vec<Fe> = (0..q2).map(|i| code_of(&lex_digits(i, p, n), p)).collect();

        // Least primitive element in enumeration order.
        let order = q2 - 1;
        let mut gen = 0;
        for &cand in top_elems.iter().skip(1) {
            let mut x = cand;
            let mut k = 1;
            while x != 1 {
                x = mulslow(x, cand);
                k += 1;
            }
            if k == order {
                gen = cand;
                break;
            }
        }
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![NONE; q2 as usize];
        let mut x = 1u32;
        for k in 0..order {
            exp[k as usize] = x;
            log[x as usize] = k;
            x = mulslow(x, gen);
        }
        let addslow = |a: u32, b: u32| -> u32 {
            let da = digits_of(a, p, n);
            let db = digits_of(b, p, n);
            let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            code_of(&s, p)
        };
        let zech: Vec<u32> = (0..order)
            .map(|k| {
                let s = addslow(1, exp[k as usize]);
                if s == 0 {
                    NONE
                } else {
                    log[s as usize]
                }
            })
            .collect();
        let neg: Vec<Fe> = (0..q2)
            .map(|a| {
                let d: Vec<u32> = digits_of(a, p, n).iter().map(|&c| (p - c) % p).collect();
                code_of(&d, p)
            })
            .collect();

        let mut t = Tower {
            p,
            f,
            q,
            q2,
            modulus_q,
            modulus_q2,
            exp,
            log,
            zech,
            neg,
            mid_root: 0,
            mid_elems: Vec::new(),
            mid_pos: vec![NONE; q2 as usize],
            top_elems,
            alpha: None,
        };

        // Embedding of F_q: least root of modulus_q in the top field.
        let mq = t.modulus_q.clone();
        let root = *t
            .top_elems
            .iter()
            .find(|&&x| {
                let mut acc = 0;
                for &c in mq.iter().rev() {
                    acc = t.add(t.mul(acc, x), c);
                }
                acc == 0
            })
            .expect("modulus_q splits in the top field");
        t.mid_root = root;
        let mut mid = Vec::with_capacity(q as usize);
        for idx in 0..q {
            let coords = lex_digits(idx, p, f);
            let mut acc = 0;
            for &c in coords.iter().rev() {
                acc = t.add(t.mul(acc, root), c);
            }
            mid.push(acc);
        }
        for (i, &x) in mid.iter().enumerate() {
            t.mid_pos[x as usize] = i as u32;
        }
        t.mid_elems = mid;

        if p != 2 {
            let half = ((q - 1) / 2) as u64;
            let ns = *t
                .mid_elems
                .iter()
                .skip(1)
                .find(|&&x| t.pow(x, half) != 1)
                .expect("odd q has non-squares");
            t.alpha = t.top_elems.iter().copied().find(|&x| t.mul(x, x) == ns);
        }
        Ok(t)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn f(&self) -> usize {
        self.f
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn q2(&self) -> u32 {
        self.q2
    }
    /// Degree of the top field over F_p.
    pub fn top_degree(&self) -> usize {
        2 * self.f
    }
    pub fn modulus_q(&self) -> &[u32] {
        &self.modulus_q
    }
    pub fn modulus_q2(&self) -> &[u32] {
        &self.modulus_q2
    }
    /// Image of the generator x of F_q = F_p[x]/(modulus_q).
    pub fn mid_root(&self) -> Fe {
        self.mid_root
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let order = self.q2 - 1;
        let la = self.log[a as usize];
        let lb = self.log[b as usize];
        let d = if lb >= la { lb - la } else { lb + order - la };
        let z = self.zech[d as usize];
        if z == NONE {
            0
        } else {
            let s = la + z;
            self.exp[(if s >= order { s - order } else { s }) as usize]
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.q2 - 1;
        let s = self.log[a as usize] + self.log[b as usize];
        self.exp[(if s >= order { s - order } else { s }) as usize]
    }

    /// Multiplicative inverse; `ZeroElement` for 0.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a == 0 {
            return Err(Error::ZeroElement);
        }
        let order = self.q2 - 1;
        let l = self.log[a as usize];
        Ok(self.exp[((order - l) % order) as usize])
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e with 0^0 = 1.
    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.q2 - 1) as u64;
        let l = self.log[a as usize] as u64;
        self.exp[((l * (e % order)) % order) as usize]
    }

    /// a^e for signed e; negative exponents need a unit.
    pub fn pow_i(&self, a: Fe, e: i64) -> Result<Fe> {
        if e >= 0 {
            return Ok(self.pow(a, e as u64));
        }
        let order = (self.q2 - 1) as i64;
        if a == 0 {
            return Err(Error::ZeroElement);
        }
        Ok(self.pow(a, e.rem_euclid(order) as u64))
    }

    /// Residue of an integer in F_p.
    pub fn from_int(&self, n: i64) -> Fe {
        n.rem_euclid(self.p as i64) as Fe
    }

    /// Integer value of an element of F_p, if it lies there.
    pub fn to_int(&self, a: Fe) -> Option<u32> {
        (a < self.p).then_some(a)
    }

    /// x ↦ x^{p^i}, with i reduced modulo the degree of the top field.
    pub fn frobenius(&self, a: Fe, i: i64) -> Fe {
        let k = i.rem_euclid(self.top_degree() as i64) as u32;
        self.pow(a, (self.p as u64).pow(k))
    }

    /// Smallest level containing the element.
    pub fn level_of(&self, a: Fe) -> Level {
        if a < self.p {
            Level::Base
        } else if self.mid_pos[a as usize] != NONE {
            Level::Mid
        } else {
            Level::Top
        }
    }

    pub fn in_level(&self, a: Fe, level: Level) -> bool {
        match level {
            Level::Base => a < self.p,
            Level::Mid => self.mid_pos[a as usize] != NONE,
            Level::Top => a < self.q2,
        }
    }

    pub fn level_degree(&self, level: Level) -> usize {
        match level {
            Level::Base => 1,
            Level::Mid => self.f,
            Level::Top => 2 * self.f,
        }
    }

    /// All elements of a level: zero first, then lexicographic in coordinates.
    pub fn elements(&self, level: Level) -> Vec<Fe> {
        match level {
            Level::Base => (0..self.p).collect(),
            Level::Mid => self.mid_elems.clone(),
            Level::Top => self.top_elems.clone(),
        }
    }

    /// Elements of F_q in enumeration order.
    pub fn fq(&self) -> &[Fe] {
        &self.mid_elems
    }

    /// Position of an F_q element in the enumeration of F_q.
    pub fn fq_index(&self, a: Fe) -> Option<usize> {
        let i = self.mid_pos[a as usize];
        (i != NONE).then_some(i as usize)
    }

    /// Coordinates of `a` at the given level (power basis of that level's modulus).
    pub fn coords(&self, a: Fe, level: Level) -> Result<Vec<u32>> {
        match level {
            Level::Base => self
                .to_int(a)
                .map(|c| vec![c])
                .ok_or_else(|| Error::LevelMismatch(format!("element {a} is not in F_p"))),
            Level::Mid => {
                let i = self
                    .fq_index(a)
                    .ok_or_else(|| Error::LevelMismatch(format!("element {a} is not in F_q")))?;
                Ok(lex_digits(i as u32, self.p, self.f))
            }
            Level::Top => Ok(digits_of(a, self.p, 2 * self.f)),
        }
    }

    /// Element with the given coordinates at a level.
    pub fn from_coords(&self, c: &[u32], level: Level) -> Result<Fe> {
        let n = self.level_degree(level);
        if c.len() != n || c.iter().any(|&x| x >= self.p) {
            return Err(Error::Parse(format!("bad coordinate vector {c:?} for a degree-{n} level")));
        }
        Ok(match level {
            Level::Base => c[0],
            Level::Mid => {
                let idx = c.iter().fold(0u32, |acc, &d| acc * self.p + d);
                self.mid_elems[idx as usize]
            }
            Level::Top => code_of(c, self.p),
        })
    }

    /// The distinguished α: the least square root of the least non-square of F_q^*.
    pub fn alpha(&self) -> Result<Fe> {
        self.alpha.ok_or(Error::EvenCharacteristic)
    }

    /// Write x = u + vα with u, v ∈ F_q.
    pub fn decompose(&self, x: Fe) -> Result<(Fe, Fe)> {
        let a = self.alpha()?;
        let xq = self.pow(x, self.q as u64);
        let two = self.inv(2)?;
        let u = self.mul(self.add(x, xq), two);
        let v = self.div(self.mul(self.sub(x, xq), two), a)?;
        Ok((u, v))
    }

    /// Norm F_{q²} → F_q, x·x^q.
    pub fn norm(&self, x: Fe) -> Fe {
        self.mul(x, self.pow(x, self.q as u64))
    }

    /// Whether `x` is a square in F_q (x ∈ F_q).
    pub fn is_square_q(&self, x: Fe) -> bool {
        x == 0 || self.q == 2 || self.pow(x, ((self.q - 1) / 2) as u64) == 1
    }

    /// Text form: integers for F_p, "[c0,...]" coordinates otherwise.
    pub fn fmt(&self, a: Fe) -> String {
        match self.level_of(a) {
            Level::Base => a.to_string(),
            lvl => {
                let c = self.coords(a, lvl).expect("level_of is consistent");
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                format!("[{}]", parts.join(","))
            }
        }
    }

    /// Parse an integer (reduced mod p) or a coordinate vector of length f or 2f.
    pub fn parse(&self, s: &str) -> Result<Fe> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            let c: Vec<u32> = inner
                .split(',')
                .map(|t| t.trim().parse::<i64>().map(|v| v.rem_euclid(self.p as i64) as u32))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("bad field element {s:?}: {e}")))?;
            if c.len() == self.f {
                self.from_coords(&c, Level::Mid)
            } else if c.len() == 2 * self.f {
                self.from_coords(&c, Level::Top)
            } else {
                Err(Error::Parse(format!("coordinate vector {s:?} must have length {} or {}", self.f, 2 * self.f)))
            }
        } else {
            let v: i64 = s.parse().map_err(|_| Error::Parse(format!("bad field element {s:?}")))?;
            Ok(self.from_int(v))
        }
    }
}

/// Binomial coefficient C(n, k) mod p by Lucas' theorem.
pub fn binom_mod(n: u64, k: u64, p: u32) -> u32 {
    if k > n {
        return 0;
    }
    let p64 = p as u64;
    let (mut n, mut k) = (n, k);
    let mut r = 1u64;
    while n > 0 || k > 0 {
        let (a, b) = (n % p64, k % p64);
        if b > a {
            return 0;
        }
        let mut c = 1u64;
        for i in 0..b {
            c = c * ((a - i) % p64) % p64;
            c = c * modinv(((i + 1) % p64) as u32, p) as u64 % p64;
        }
        r = r * c % p64;
        n /= p64;
        k /= p64;
    }
    r as u32
}

/// Falling factorial [n]_m mod p: 1 for m = 0, n(n-1)...(n-m+1) for m > 0, 0 for m < 0.
pub fn falling(n: i64, m: i64, p: u32) -> u32 {
    if m < 0 {
        return 0;
    }
    let p = p as i64;
    let mut r = 1i64;
    for i in 0..m {
        r = r * (n - i).rem_euclid(p) % p;
        if r == 0 {
            return 0;
        }
    }
    r as u32
}

/// Falling factorial over the integers (for oracle comparisons).
pub fn falling_int(n: i64, m: i64) -> i128 {
    if m < 0 {
        return 0;
    }
    (0..m).fold(1i128, |acc, i| acc * (n - i) as i128)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_towers() {
        let t = Tower::new(5, 1).unwrap();
        assert_eq!(t.q(), 5);
        assert_eq!(t.q2(), 25);
        assert_eq!(t.elements(Level::Base).len(), 5);
        // x^2 + x + 1 is the least irreducible quadratic over F_5.
        assert_eq!(t.modulus_q2(), &[1, 1, 1]);
        let t9 = Tower::new(3, 2).unwrap();
        assert_eq!(t9.modulus_q(), &[1, 0, 1]);
        assert_eq!(t9.elements(Level::Mid).len(), 9);
        let t2 = Tower::new(2, 1).unwrap();
        assert_eq!(t2.alpha(), Err(Error::EvenCharacteristic));
        assert_eq!(t2.elements(Level::Base), vec![0, 1]);
    }

    #[test]
    fn guards() {
        assert_eq!(Tower::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(Tower::new(3, 5), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn alpha_values() {
        for p in [3u64, 5] {
            let t = Tower::new(p, 1).unwrap();
            let a = t.alpha().unwrap();
            assert_eq!(t.mul(a, a), 2);
            assert_eq!(t.level_of(a), Level::Top);
        }
        let t = Tower::new(3, 2).unwrap();
        let a = t.alpha().unwrap();
        assert!(t.fq_index(t.mul(a, a)).is_some());
        assert!(t.fq_index(a).is_none());
    }

    #[test]
    fn frobenius_fixes_levels() {
        let t = Tower::new(3, 2).unwrap();
        for &x in t.fq() {
            assert_eq!(t.frobenius(x, 2), x);
        }
        for x in t.elements(Level::Base) {
            assert_eq!(t.frobenius(x, 1), x);
        }
        for x in t.elements(Level::Top) {
            assert_eq!(t.frobenius(x, 4), x);
        }
        // A generator g of F_9^* maps to g^3.
        let g = *t.fq().iter().find(|&&x| x != 0 && (1..8).all(|k| t.pow(x, k) != 1)).unwrap();
        assert_eq!(t.frobenius(g, 1), t.pow(g, 3));
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let t = Tower::new(3, 2).unwrap();
        let e = t.elements(Level::Mid);
        let coords: Vec<Vec<u32>> = e.iter().map(|&x| t.coords(x, Level::Mid).unwrap()).collect();
        let mut sorted = coords.clone();
        sorted.sort();
        assert_eq!(coords, sorted);
        let mut dedup = e.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 9);
        assert_eq!(e[0], 0);
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let t = Tower::new(3, 2).unwrap();
        let fq = t.fq();
        for &x in fq {
            for &y in fq {
                assert!(t.fq_index(t.add(x, y)).is_some());
                assert!(t.fq_index(t.mul(x, y)).is_some());
            }
        }
        for c in 0..3 {
            assert_eq!(t.from_coords(&[c, 0], Level::Mid).unwrap(), c);
        }
    }

    #[test]
    fn decompose_roundtrip() {
        let t = Tower::new(5, 1).unwrap();
        let a = t.alpha().unwrap();
        for x in t.elements(Level::Top) {
            let (u, v) = t.decompose(x).unwrap();
            assert_eq!(t.level_of(u), Level::Base);
            assert_eq!(t.level_of(v), Level::Base);
            assert_eq!(t.add(u, t.mul(v, a)), x);
        }
    }

    #[test]
    fn falling_and_binomials() {
        assert_eq!(falling(5, 2, 7), 6);
        assert_eq!(falling_int(5, 2), 20);
        assert_eq!(falling(9, 0, 3), 1);
        assert_eq!(falling(4, -3, 5), 0);
        assert_eq!(binom_mod(22, 2, 5), 1);
        assert_eq!(binom_mod(10, 1, 5), 0);
        assert_eq!(binom_mod(18, 2, 5), 3);
    }

    #[test]
    fn text_roundtrip() {
        let t = Tower::new(3, 2).unwrap();
        for x in t.elements(Level::Top) {
            assert_eq!(t.parse(&t.fmt(x)).unwrap(), x);
        }
        assert_eq!(t.parse("-1").unwrap(), 2);
    }
}
