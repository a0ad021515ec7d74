//! Full-rank lattices in `Q^n` (n = 2 or 4) in canonical Hermite form,
//! with indices, sums, intersections, coset enumeration and modular solving.

use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::intmat::{column_hnf, hnf_basis, snf, Int, IntMatrix, Snf};
use crate::quad::{FieldTag, OrderRef, QuadInt};

/// Default upper bound on the number of coset representatives enumerated.
pub const DEFAULT_COSET_CAP: u64 = 1_000_000;

/// Coset cap, overridable through `CUSPFORGE_COSET_CAP`.
pub fn coset_cap() -> u64 {
    static CAP: OnceLock<u64> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("CUSPFORGE_COSET_CAP")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_COSET_CAP)
    })
}

/// A rational vector `num / den` with `den > 0` and `gcd(num, den) = 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatVec {
    den: Int,
    num: Vec<Int>,
}

impl fmt::Debug for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (p, q)) in self.entries().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write_fraction(f, p, q)?;
        }
        write!(f, ")")
    }
}

pub(crate) fn write_fraction(f: &mut impl fmt::Write, p: &Int, q: &Int) -> fmt::Result {
    if q.is_one() {
        write!(f, "{p}")
    } else {
        write!(f, "{p}/{q}")
    }
}

impl RatVec {
    pub fn new(num: Vec<Int>, den: Int) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut g = den.clone();
        for x in &num {
            g = g.gcd(x);
        }
        if den.is_negative() {
            g = -g;
        }
        RatVec {
            num: num.into_iter().map(|x| x / &g).collect(),
            den: den / g,
        }
    }

    pub fn zeros(n: usize) -> Self {
        RatVec {
            num: vec![Int::zero(); n],
            den: Int::one(),
        }
    }

    pub fn from_ints(num: Vec<Int>) -> Self {
        RatVec {
            num,
            den: Int::one(),
        }
    }

    /// Builds a vector from per-entry fractions `(p, q)`.
    pub fn from_fractions(entries: &[(Int, Int)]) -> Result<Self> {
        let mut den = Int::one();
        for (_, q) in entries {
            if q.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            den = den.lcm(q);
        }
        let num = entries.iter().map(|(p, q)| p * (&den / q)).collect();
        Ok(RatVec::new(num, den))
    }

    pub fn len(&self) -> usize {
        self.num.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num.is_empty()
    }

    pub fn num(&self) -> &[Int] {
        &self.num
    }

    pub fn den(&self) -> &Int {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Per-entry reduced fractions.
    pub fn entries(&self) -> Vec<(Int, Int)> {
        self.num
            .iter()
            .map(|p| {
                let g = p.gcd(&self.den);
                if g.is_zero() {
                    (Int::zero(), Int::one())
                } else {
                    (p / &g, &self.den / &g)
                }
            })
            .collect()
    }

    pub fn add(&self, o: &RatVec) -> RatVec {
        assert_eq!(self.len(), o.len());
        let den = self.den.lcm(&o.den);
        let (f1, f2) = (&den / &self.den, &den / &o.den);
        let num = self
            .num
            .iter()
            .zip(&o.num)
            .map(|(a, b)| a * &f1 + b * &f2)
            .collect();
        RatVec::new(num, den)
    }

    pub fn neg(&self) -> RatVec {
        RatVec {
            num: self.num.iter().map(|x| -x).collect(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatVec) -> RatVec {
        self.add(&o.neg())
    }

    /// `self * p / q`.
    pub fn scale(&self, p: &Int, q: &Int) -> RatVec {
        RatVec::new(self.num.iter().map(|x| x * p).collect(), &self.den * q)
    }

    /// `M * self` for an integer matrix `M`.
    pub fn transform(&self, m: &IntMatrix) -> RatVec {
        RatVec::new(m.mul_vec(&self.num), self.den.clone())
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> RatVec {
        RatVec::new(self.num[range].to_vec(), self.den.clone())
    }

    pub fn concat(&self, o: &RatVec) -> RatVec {
        let den = self.den.lcm(&o.den);
        let (f1, f2) = (&den / &self.den, &den / &o.den);
        let num = self
            .num
            .iter()
            .map(|a| a * &f1)
            .chain(o.num.iter().map(|b| b * &f2))
            .collect();
        RatVec::new(num, den)
    }

    /// The field element in the first two coordinates times `q`.
    pub fn mul_quad(&self, q: &QuadInt) -> RatVec {
        assert_eq!(self.len(), 2);
        self.transform(&q.mul_matrix())
    }

    /// `self / q` for a field element stored in two coordinates.
    pub fn div_quad(&self, q: &QuadInt) -> Result<RatVec> {
        assert_eq!(self.len(), 2);
        if q.is_zero() {
            return Err(Error::domain("division by zero"));
        }
        Ok(self.mul_quad(&q.conj()).scale(&Int::one(), &q.norm()))
    }
}

/// A full-rank lattice `den^-1 * basis * Z^n`, with `basis` in column Hermite
/// form and `den` minimal; equal lattices have identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZLattice {
    basis: IntMatrix,
    den: Int,
}

impl fmt::Debug for ZLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZLattice({:?}", self.basis)?;
        if !self.den.is_one() {
            write!(f, " / {}", self.den)?;
        }
        write!(f, ")")
    }
}

impl ZLattice {
    /// The lattice spanned by `gens / den` (at least `n` generators of rank `n`).
    pub fn from_generators(n: usize, gens: &[Vec<Int>], den: &Int) -> Result<ZLattice> {
        if gens.is_empty() {
            return Err(Error::DegenerateLattice("no generators".into()));
        }
        for g in gens {
            if g.len() != n {
                return Err(Error::domain("generator of the wrong dimension"));
            }
        }
        let m = IntMatrix::from_columns(gens);
        let h = hnf_basis(&m)?;
        Ok(Self::from_hnf(h, den.clone()))
    }

    /// The lattice spanned by the columns of `m`.
    pub fn from_matrix(m: &IntMatrix) -> Result<ZLattice> {
        Self::from_generators(m.rows(), &m.columns(), &Int::one())
    }

    pub fn from_rat_generators(n: usize, gens: &[RatVec]) -> Result<ZLattice> {
        let mut den = Int::one();
        for g in gens {
            den = den.lcm(g.den());
        }
        let cols: Vec<Vec<Int>> = gens
            .iter()
            .map(|g| {
                let f = &den / g.den();
                g.num().iter().map(|x| x * &f).collect()
            })
            .collect();
        Self::from_generators(n, &cols, &den)
    }

    fn from_hnf(h: IntMatrix, den: Int) -> ZLattice {
        assert!(den.is_positive());
        let g = h.content().gcd(&den);
        if g.is_one() {
            ZLattice { basis: h, den }
        } else {
            let cols: Vec<Vec<Int>> = h
                .columns()
                .into_iter()
                .map(|c| c.into_iter().map(|x| x / &g).collect())
                .collect();
            ZLattice {
                basis: IntMatrix::from_columns(&cols),
                den: den / g,
            }
        }
    }

    /// `diag(entries) * Z^n`.
    pub fn diagonal(entries: &[Int]) -> Result<ZLattice> {
        let n = entries.len();
        let cols: Vec<Vec<Int>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| if i == j { entries[j].clone() } else { Int::zero() })
                    .collect()
            })
            .collect();
        Self::from_generators(n, &cols, &Int::one())
    }

    pub fn standard(n: usize) -> ZLattice {
        ZLattice {
            basis: IntMatrix::identity(n),
            den: Int::one(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn den(&self) -> &Int {
        &self.den
    }

    /// `Z^n` itself.
    pub fn is_standard(&self) -> bool {
        self.den.is_one() && self.basis == IntMatrix::identity(self.dim())
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Basis vectors as rational vectors.
    pub fn basis_vectors(&self) -> Vec<RatVec> {
        self.basis
            .columns()
            .into_iter()
            .map(|c| RatVec::new(c, self.den.clone()))
            .collect()
    }

    /// Covolume as a reduced fraction `(p, q)`.
    pub fn covolume(&self) -> (Int, Int) {
        let mut p = Int::one();
        for i in 0..self.dim() {
            p *= self.basis.get(i, i);
        }
        let q = num_traits::pow(self.den.clone(), self.dim());
        let g = p.gcd(&q);
        (p / &g, q / g)
    }

    /// Integer coordinates of `den * v` in the basis, if they exist.
    fn integer_coords(&self, w: &[Int]) -> Option<Vec<Int>> {
        let n = self.dim();
        let mut rest = w.to_vec();
        let mut coords = vec![Int::zero(); n];
        for i in 0..n {
            let p = self.basis.get(i, i);
            if !rest[i].is_multiple_of(p) {
                return None;
            }
            let c = &rest[i] / p;
            for (r, entry) in rest.iter_mut().enumerate().skip(i) {
                *entry -= &c * self.basis.get(r, i);
            }
            coords[i] = c;
        }
        Some(coords)
    }

    pub fn contains(&self, v: &RatVec) -> bool {
        assert_eq!(v.len(), self.dim());
        let scaled: Vec<Int> = v.num().iter().map(|x| x * &self.den).collect();
        if !scaled.iter().all(|x| x.is_multiple_of(v.den())) {
            return false;
        }
        let w: Vec<Int> = scaled.into_iter().map(|x| x / v.den()).collect();
        self.integer_coords(&w).is_some()
    }

    /// Coordinates of `v` in the basis (as integers), or `None` if `v` is not in the lattice.
    pub fn coordinates(&self, v: &RatVec) -> Option<Vec<Int>> {
        let scaled: Vec<Int> = v.num().iter().map(|x| x * &self.den).collect();
        if !scaled.iter().all(|x| x.is_multiple_of(v.den())) {
            return None;
        }
        let w: Vec<Int> = scaled.into_iter().map(|x| x / v.den()).collect();
        self.integer_coords(&w)
    }

    /// Canonical representative of `v` modulo the lattice: in the Hermite
    /// coordinates every entry lands in `[0, pivot)`.
    pub fn reduce(&self, v: &RatVec) -> RatVec {
        assert_eq!(v.len(), self.dim());
        let big = v.den().lcm(&self.den);
        let f = &big / &self.den;
        let mut a: Vec<Int> = v.num().iter().map(|x| x * (&big / v.den())).collect();
        let n = self.dim();
        for i in 0..n {
            let p = self.basis.get(i, i) * &f;
            let q = a[i].div_floor(&p);
            if !q.is_zero() {
                for (r, entry) in a.iter_mut().enumerate().skip(i) {
                    *entry -= &q * self.basis.get(r, i) * &f;
                }
            }
        }
        RatVec::new(a, big)
    }

    pub fn contains_lattice(&self, other: &ZLattice) -> bool {
        other.basis_vectors().iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &ZLattice) -> ZLattice {
        let mut gens = self.basis_vectors();
        gens.extend(other.basis_vectors());
        Self::from_rat_generators(self.dim(), &gens).expect("sum of full-rank lattices")
    }

    pub fn intersect(&self, other: &ZLattice) -> ZLattice {
        let n = self.dim();
        let big = self.den.lcm(&other.den);
        let a = self.basis.scale(&(&big / &self.den));
        let b = other.basis.scale(&(&big / &other.den));
        // a*s = b*t  <=>  [a | -b] (s, t) = 0
        let mut cols = a.columns();
        cols.extend(b.scale(&-Int::one()).columns());
        let stacked = IntMatrix::from_columns(&cols);
        let h = column_hnf(&stacked).expect("stacked bases have full row rank");
        let kernel_s = IntMatrix::from_columns(
            &(n..2 * n)
                .map(|j| h.transform.column(j)[..n].to_vec())
                .collect::<Vec<_>>(),
        );
        let gens = a.mul(&kernel_s);
        Self::from_generators(n, &gens.columns(), &big).expect("intersection of full-rank lattices")
    }

    /// `[sup : self]`.
    pub fn index_in(&self, sup: &ZLattice) -> Result<Int> {
        if sup.is_standard() {
            if !self.is_integral() {
                return Err(Error::NotContained);
            }
            return Ok(self.covolume().0);
        }
        if !sup.contains_lattice(self) {
            return Err(Error::NotContained);
        }
        let (p1, q1) = self.covolume();
        let (p2, q2) = sup.covolume();
        let num = p1 * q2;
        let den = q1 * p2;
        debug_assert!(num.is_multiple_of(&den));
        Ok(num / den)
    }

    /// `M * self` for a nonsingular integer matrix `M`.
    pub fn image(&self, m: &IntMatrix) -> Result<ZLattice> {
        let gens = m.mul(&self.basis);
        Self::from_generators(self.dim(), &gens.columns(), &self.den)
    }

    /// Representatives of `sup / self`, each canonical modulo `self`.
    pub fn cosets_in(&self, sup: &ZLattice) -> Result<Vec<RatVec>> {
        self.cosets_in_capped(sup, coset_cap())
    }

    pub fn cosets_in_capped(&self, sup: &ZLattice, cap: u64) -> Result<Vec<RatVec>> {
        let index = self.index_in(sup)?;
        if index > Int::from(cap) {
            return Err(Error::ResourceCap {
                needed: index.to_string(),
                cap,
            });
        }
        let rel = relative_basis(self, sup);
        let f: Snf = snf(&rel);
        let diag: Vec<u64> = f
            .diagonal()
            .iter()
            .map(|x| x.to_u64().expect("bounded by the cap"))
            .collect();
        let n = self.dim();
        // sup basis * U
        let sup_u = sup.basis.mul(&f.u);
        let mut out = Vec::with_capacity(index.to_usize().unwrap_or(0));
        let mut k = vec![0u64; n];
        loop {
            let kv: Vec<Int> = k.iter().map(|&x| Int::from(x)).collect();
            let v = RatVec::new(sup_u.mul_vec(&kv), sup.den.clone());
            out.push(self.reduce(&v));
            // odometer over the box prod [0, d_i)
            let mut i = 0;
            loop {
                if i == n {
                    return Ok(out);
                }
                k[i] += 1;
                if k[i] < diag[i] {
                    break;
                }
                k[i] = 0;
                i += 1;
            }
        }
    }

    /// `v = w` modulo the lattice.
    pub fn congruent(&self, v: &RatVec, w: &RatVec) -> bool {
        self.contains(&v.sub(w))
    }
}

/// Integer matrix `C` with `sub.basis / sub.den = (sup.basis / sup.den) * C`.
fn relative_basis(sub: &ZLattice, sup: &ZLattice) -> IntMatrix {
    let cols: Vec<Vec<Int>> = sub
        .basis_vectors()
        .iter()
        .map(|v| sup.coordinates(v).expect("sub is contained in sup"))
        .collect();
    IntMatrix::from_columns(&cols)
}

/// A full-rank lattice in the field, in coordinates `(1, w)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice2 {
    tag: FieldTag,
    lat: ZLattice,
}

impl Lattice2 {
    pub fn from_zlattice(tag: FieldTag, lat: ZLattice) -> Result<Self> {
        if lat.dim() != 2 {
            return Err(Error::domain("expected a rank-2 lattice"));
        }
        Ok(Lattice2 { tag, lat })
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn zlattice(&self) -> &ZLattice {
        &self.lat
    }

    pub fn basis(&self) -> &IntMatrix {
        self.lat.basis()
    }

    /// The order of conductor `m`, basis `{1, m*w}`.
    pub fn of_order(o: OrderRef) -> Lattice2 {
        let lat = ZLattice::diagonal(&[Int::one(), Int::from(o.conductor())])
            .expect("positive conductor");
        Lattice2 { tag: o.tag(), lat }
    }

    pub fn maximal(tag: FieldTag) -> Lattice2 {
        Self::of_order(OrderRef::maximal(tag))
    }

    /// `sum_i g_i * O_m` for the order `scale`.
    pub fn span(gens: &[QuadInt], scale: OrderRef) -> Result<Lattice2> {
        let pairs: Vec<(QuadInt, OrderRef)> = gens.iter().map(|g| (g.clone(), scale)).collect();
        Self::span_mixed(&pairs)
    }

    /// `sum_i g_i * O_{m_i}` with a separate order for every generator.
    pub fn span_mixed(gens: &[(QuadInt, OrderRef)]) -> Result<Lattice2> {
        let Some((first, _)) = gens.first() else {
            return Err(Error::DegenerateLattice("no generators".into()));
        };
        let tag = first.tag();
        let mut cols = Vec::with_capacity(2 * gens.len());
        for (g, o) in gens {
            tag.check_same(g.tag())?;
            tag.check_same(o.tag())?;
            let mw = QuadInt::new(tag, 0, o.conductor());
            cols.push(g.coords().to_vec());
            cols.push((g * &mw).coords().to_vec());
        }
        let lat = ZLattice::from_generators(2, &cols, &Int::one())?;
        Ok(Lattice2 { tag, lat })
    }

    /// The plain Z-span of the given elements.
    pub fn z_span(tag: FieldTag, gens: &[QuadInt]) -> Result<Lattice2> {
        let cols: Vec<Vec<Int>> = gens.iter().map(|g| g.coords().to_vec()).collect();
        let lat = ZLattice::from_generators(2, &cols, &Int::one())?;
        Ok(Lattice2 { tag, lat })
    }

    /// `q * self` for a nonzero field element.
    pub fn scaled_by(&self, q: &QuadInt) -> Result<Lattice2> {
        self.tag.check_same(q.tag())?;
        if q.is_zero() {
            return Err(Error::DegenerateLattice("scaling by zero".into()));
        }
        Ok(Lattice2 {
            tag: self.tag,
            lat: self.lat.image(&q.mul_matrix())?,
        })
    }

    /// `q^-1 * self`.
    pub fn divided_by(&self, q: &QuadInt) -> Result<Lattice2> {
        self.tag.check_same(q.tag())?;
        if q.is_zero() {
            return Err(Error::domain("division by zero"));
        }
        let gens: Vec<RatVec> = self
            .lat
            .basis_vectors()
            .iter()
            .map(|v| v.div_quad(q))
            .collect::<Result<_>>()?;
        Ok(Lattice2 {
            tag: self.tag,
            lat: ZLattice::from_rat_generators(2, &gens)?,
        })
    }

    /// `[sup : sub]`.
    pub fn index(sub: &Lattice2, sup: &Lattice2) -> Result<Int> {
        sub.tag.check_same(sup.tag)?;
        sub.lat.index_in(&sup.lat)
    }

    /// Index in the maximal order (for integral lattices).
    pub fn index_in_maximal(&self) -> Result<Int> {
        Self::index(self, &Self::maximal(self.tag))
    }

    pub fn sum(&self, other: &Lattice2) -> Result<Lattice2> {
        self.tag.check_same(other.tag)?;
        Ok(Lattice2 {
            tag: self.tag,
            lat: self.lat.sum(&other.lat),
        })
    }

    pub fn intersect(&self, other: &Lattice2) -> Result<Lattice2> {
        self.tag.check_same(other.tag)?;
        Ok(Lattice2 {
            tag: self.tag,
            lat: self.lat.intersect(&other.lat),
        })
    }

    pub fn contains(&self, q: &QuadInt) -> bool {
        q.tag() == self.tag && self.lat.contains(&RatVec::from_ints(q.coords().to_vec()))
    }

    pub fn contains_vec(&self, v: &RatVec) -> bool {
        self.lat.contains(v)
    }

    pub fn reduce(&self, v: &RatVec) -> RatVec {
        self.lat.reduce(v)
    }

    /// Canonical representatives of `sup / sub`.
    pub fn cosets(sub: &Lattice2, sup: &Lattice2) -> Result<Vec<RatVec>> {
        sub.tag.check_same(sup.tag)?;
        sub.lat.cosets_in(&sup.lat)
    }

    /// Coset representatives of an integral `sub` in `sup` as ring elements.
    pub fn coset_elements(sub: &Lattice2, sup: &Lattice2) -> Result<Vec<QuadInt>> {
        Self::cosets(sub, sup)?
            .into_iter()
            .map(|v| {
                if v.is_integral() {
                    Ok(QuadInt::from_coords(sub.tag, v.num()))
                } else {
                    Err(Error::domain("coset representatives are not integral"))
                }
            })
            .collect()
    }
}

/// A full-rank lattice in the square of the field, in coordinates `(1, w) x (1, w)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice4 {
    tag: FieldTag,
    lat: ZLattice,
}

impl Lattice4 {
    pub fn from_zlattice(tag: FieldTag, lat: ZLattice) -> Result<Self> {
        if lat.dim() != 4 {
            return Err(Error::domain("expected a rank-4 lattice"));
        }
        Ok(Lattice4 { tag, lat })
    }

    /// `L1 x L2`.
    pub fn product(a: &Lattice2, b: &Lattice2) -> Result<Lattice4> {
        a.tag.check_same(b.tag)?;
        let mut gens = Vec::new();
        for v in a.lat.basis_vectors() {
            gens.push(v.concat(&RatVec::zeros(2)));
        }
        for v in b.lat.basis_vectors() {
            gens.push(RatVec::zeros(2).concat(&v));
        }
        Ok(Lattice4 {
            tag: a.tag,
            lat: ZLattice::from_rat_generators(4, &gens)?,
        })
    }

    /// The period lattice `O_{m1} x O_{m2}`.
    pub fn of_orders(o1: OrderRef, o2: OrderRef) -> Result<Lattice4> {
        Self::product(&Lattice2::of_order(o1), &Lattice2::of_order(o2))
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn zlattice(&self) -> &ZLattice {
        &self.lat
    }

    pub fn basis(&self) -> &IntMatrix {
        self.lat.basis()
    }

    pub fn index(sub: &Lattice4, sup: &Lattice4) -> Result<Int> {
        sub.tag.check_same(sup.tag)?;
        sub.lat.index_in(&sup.lat)
    }

    pub fn contains(&self, v: &RatVec) -> bool {
        self.lat.contains(v)
    }

    pub fn reduce(&self, v: &RatVec) -> RatVec {
        self.lat.reduce(v)
    }
}

/// Precomputed solver for `A x = b (mod target)`, `x` taken modulo `source`,
/// reusable across right-hand sides.
#[derive(Clone, Debug)]
pub struct ModSolver {
    adj: IntMatrix,
    det: Int,
    source: ZLattice,
    /// `A^-1 t` for coset representatives `t` of `A*source` in `target`.
    offsets: Vec<RatVec>,
}

impl ModSolver {
    pub fn new(a: &IntMatrix, target: &ZLattice, source: &ZLattice) -> Result<ModSolver> {
        Self::with_cap(a, target, source, coset_cap())
    }

    pub fn with_cap(a: &IntMatrix, target: &ZLattice, source: &ZLattice, cap: u64) -> Result<ModSolver> {
        let n = a.rows();
        if a.cols() != n || target.dim() != n || source.dim() != n {
            return Err(Error::domain("dimension mismatch in modular system"));
        }
        let det = a.det();
        if det.is_zero() {
            return Err(Error::DegenerateIntersection(
                "singular system has infinitely many solutions or none".into(),
            ));
        }
        let image = source.image(a)?;
        if !target.contains_lattice(&image) {
            return Err(Error::domain(
                "the system is not well defined: A * source is not inside target",
            ));
        }
        let adj = a.adjugate();
        let reps = image.cosets_in_capped(target, cap)?;
        let offsets = reps
            .iter()
            .map(|t| t.transform(&adj).scale(&Int::one(), &det))
            .collect();
        Ok(ModSolver {
            adj,
            det,
            source: source.clone(),
            offsets,
        })
    }

    /// Number of solutions for any consistent right-hand side.
    pub fn count(&self) -> usize {
        self.offsets.len()
    }

    /// All solutions modulo `source`, canonical and sorted.
    pub fn solve(&self, b: &RatVec) -> Vec<RatVec> {
        let x0 = b.transform(&self.adj).scale(&Int::one(), &self.det);
        let mut out: Vec<RatVec> = self
            .offsets
            .iter()
            .map(|o| self.source.reduce(&x0.add(o)))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// All `x` modulo `source` with `A x` in `b + target`.
pub fn solve_mod(a: &IntMatrix, b: &RatVec, target: &ZLattice, source: &ZLattice) -> Result<Vec<RatVec>> {
    Ok(ModSolver::new(a, target, source)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag(d: u32) -> FieldTag {
        FieldTag::new(d).unwrap()
    }

    fn q(d: u32, x: i64, y: i64) -> QuadInt {
        QuadInt::new(tag(d), x, y)
    }

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn order_lattices() {
        let t = tag(3);
        let o1 = Lattice2::of_order(OrderRef::maximal(t));
        assert_eq!(*o1.basis(), IntMatrix::identity(2));
        let o2 = Lattice2::of_order(OrderRef::new(t, 2).unwrap());
        let o6 = Lattice2::of_order(OrderRef::new(t, 6).unwrap());
        assert_eq!(Lattice2::index(&o6, &o1).unwrap(), Int::from(6));
        assert_eq!(Lattice2::index(&o6, &o2).unwrap(), Int::from(3));
        assert!(Lattice2::index(&o2, &o6).is_err());
        assert!(o2.contains(&q(3, 0, 2)));
        assert!(!o2.contains(&q(3, 0, 1)));
    }

    #[test]
    fn spans() {
        let m1 = OrderRef::maximal(tag(3));
        assert_eq!(Lattice2::span(&[q(3, 1, 0)], m1).unwrap(), Lattice2::maximal(tag(3)));
        assert_eq!(
            Lattice2::span(&[q(3, 1, 1), q(3, 1, 0)], m1).unwrap().index_in_maximal().unwrap(),
            Int::one()
        );
        assert_eq!(
            Lattice2::span(&[q(3, -1, 2)], m1).unwrap().index_in_maximal().unwrap(),
            Int::from(3)
        );
        assert!(matches!(
            Lattice2::span(&[q(3, 0, 0)], m1),
            Err(Error::DegenerateLattice(_))
        ));
    }

    #[test]
    fn sum_intersection_identity() {
        let t = tag(1);
        let a = Lattice2::z_span(t, &[q(1, 4, 2), q(1, -2, 6)]).unwrap();
        let b = Lattice2::z_span(t, &[q(1, 3, 0), q(1, 1, 6)]).unwrap();
        let s = a.sum(&b).unwrap();
        let i = a.intersect(&b).unwrap();
        let idx = |l: &Lattice2| l.index_in_maximal().unwrap();
        assert_eq!(idx(&a) * idx(&b), idx(&s) * idx(&i));
        assert_eq!(a.intersect(&a).unwrap(), a);
        assert_eq!(a.sum(&Lattice2::maximal(t)).unwrap(), Lattice2::maximal(t));
    }

    #[test]
    fn rational_lattices_and_reduction() {
        let t = tag(3);
        let l = Lattice2::maximal(t).divided_by(&q(3, 2, 0)).unwrap();
        assert_eq!(l.zlattice().den(), &Int::from(2));
        assert!(l.contains_vec(&RatVec::new(ints(&[1, 1]), Int::from(2))));
        let v = RatVec::new(ints(&[7, -3]), Int::from(4));
        let r = l.reduce(&v);
        assert_eq!(r, RatVec::new(ints(&[1, 1]), Int::from(4)));
        assert!(l.contains_vec(&v.sub(&r)));
    }

    #[test]
    fn cosets_are_distinct_and_complete() {
        let t = tag(3);
        let sub = Lattice2::span(&[q(3, 2, 1), q(3, 0, 3)], OrderRef::new(t, 2).unwrap()).unwrap();
        let sup = Lattice2::maximal(t);
        let reps = Lattice2::cosets(&sub, &sup).unwrap();
        let idx = Lattice2::index(&sub, &sup).unwrap();
        assert_eq!(Int::from(reps.len()), idx);
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                assert!(!sub.contains_vec(&reps[i].sub(&reps[j])));
            }
        }
        assert!(idx > Int::one());
        let cap = (&idx - 1u32).to_u64().unwrap();
        assert!(matches!(
            sub.zlattice().cosets_in_capped(sup.zlattice(), cap),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn solve_mod_identity_and_scaling() {
        let z4 = ZLattice::standard(4);
        let sols = solve_mod(&IntMatrix::identity(4), &RatVec::zeros(4), &z4, &z4).unwrap();
        assert_eq!(sols, vec![RatVec::zeros(4)]);
        // 2x = 0 mod Z^4 has 16 solutions in (1/2 Z / Z)^4
        let two = IntMatrix::identity(4).scale(&Int::from(2));
        let sols = solve_mod(&two, &RatVec::zeros(4), &z4, &z4).unwrap();
        assert_eq!(sols.len(), 16);
        assert!(solve_mod(&IntMatrix::zeros(4, 4), &RatVec::zeros(4), &z4, &z4).is_err());
    }
}
