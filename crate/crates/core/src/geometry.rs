//! Elliptic curves `E(a,b) + P` on products `E_{m1} x E_{m2}` of CM elliptic
//! curves, their intersections, and elliptic configurations.
//!
//! A point of `C^2` lies on `E(a,b) + P` exactly when `psi(X) = b*u - a*v`
//! agrees with `psi(P)` modulo `M = b*O_{m1} + a*O_{m2}`. The pair
//! (normalized direction, `psi(P) mod M`) identifies the curve.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::intmat::{Int, IntMatrix};
use crate::lattice::{Lattice2, Lattice4, ModSolver, RatVec};
use crate::quad::{FieldTag, OrderRef, QuadInt};

/// The square `C^2 / (O_{m1} x O_{m2})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ambient {
    tag: FieldTag,
    o1: OrderRef,
    o2: OrderRef,
}

impl Ambient {
    pub fn new(tag: FieldTag, m1: u64, m2: u64) -> Result<Self> {
        Ok(Ambient {
            tag,
            o1: OrderRef::new(tag, m1)?,
            o2: OrderRef::new(tag, m2)?,
        })
    }

    pub fn maximal(tag: FieldTag) -> Self {
        Ambient {
            tag,
            o1: OrderRef::maximal(tag),
            o2: OrderRef::maximal(tag),
        }
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn orders(&self) -> (OrderRef, OrderRef) {
        (self.o1, self.o2)
    }

    pub fn conductors(&self) -> (u64, u64) {
        (self.o1.conductor(), self.o2.conductor())
    }

    pub fn is_maximal(&self) -> bool {
        self.o1.is_maximal() && self.o2.is_maximal()
    }

    pub fn lattice(&self) -> Lattice4 {
        Lattice4::of_orders(self.o1, self.o2).expect("same tag")
    }

    /// Canonical representative modulo the period lattice.
    pub fn reduce(&self, v: &RatVec) -> RatVec {
        // the period lattice is diag(1, m1, 1, m2), so reduction is entrywise
        let periods = [
            Int::from(1),
            Int::from(self.o1.conductor()),
            Int::from(1),
            Int::from(self.o2.conductor()),
        ];
        let den = v.den();
        let num = v
            .num()
            .iter()
            .zip(&periods)
            .map(|(x, p)| num_integer::Integer::mod_floor(x, &(p * den)))
            .collect();
        RatVec::new(num, den.clone())
    }
}

/// A torsion point of the ambient square, stored canonically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionPoint {
    coords: RatVec,
}

impl TorsionPoint {
    pub fn new(ambient: &Ambient, coords: RatVec) -> Result<Self> {
        if coords.len() != 4 {
            return Err(Error::domain("a point of the square has four coordinates"));
        }
        Ok(TorsionPoint {
            coords: ambient.reduce(&coords),
        })
    }

    pub fn origin() -> Self {
        TorsionPoint {
            coords: RatVec::zeros(4),
        }
    }

    /// The point `(p, q)` given by field elements in coordinates.
    pub fn from_pair(ambient: &Ambient, p: &RatVec, q: &RatVec) -> Self {
        TorsionPoint {
            coords: ambient.reduce(&p.concat(q)),
        }
    }

    pub fn coords(&self) -> &RatVec {
        &self.coords
    }

    pub fn first(&self) -> RatVec {
        self.coords.slice(0..2)
    }

    pub fn second(&self) -> RatVec {
        self.coords.slice(2..4)
    }

    pub fn is_origin(&self) -> bool {
        self.coords.is_zero()
    }

    pub fn translate(&self, ambient: &Ambient, t: &TorsionPoint) -> TorsionPoint {
        TorsionPoint {
            coords: ambient.reduce(&self.coords.add(&t.coords)),
        }
    }
}

/// `(a, b) / gcd(a, b)`, scaled by the unit that makes the first nonzero entry canonical.
pub fn normalize_direction(a: &QuadInt, b: &QuadInt) -> Result<(QuadInt, QuadInt)> {
    let g = a.gcd(b)?;
    let a1 = a.div_exact(&g)?.expect("gcd divides");
    let b1 = b.div_exact(&g)?.expect("gcd divides");
    let lead = if a1.is_zero() { &b1 } else { &a1 };
    let u = lead.canonicalizing_unit();
    Ok((&a1 * &u, &b1 * &u))
}

/// `psi(P) = b*P1 - a*P2`.
fn psi(a: &QuadInt, b: &QuadInt, p: &RatVec) -> RatVec {
    p.slice(0..2).mul_quad(b).sub(&p.slice(2..4).mul_quad(a))
}

/// Identity of a curve as a point set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveKey {
    pub dir: (QuadInt, QuadInt),
    pub offset: RatVec,
}

/// An elliptic curve `E(a,b) + P` on a square.
#[derive(Clone, Debug)]
pub struct CurveOnSquare {
    ambient: Ambient,
    slope: (QuadInt, QuadInt),
    base: TorsionPoint,
    canonical: bool,
    key: CurveKey,
    offset_lattice: Lattice2,
}

impl PartialEq for CurveOnSquare {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.key == other.key
    }
}

impl Eq for CurveOnSquare {}

impl std::hash::Hash for CurveOnSquare {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.key.hash(state);
    }
}

/// `b*O_{m1} + a*O_{m2}`, the lattice of values of `psi` on periods.
fn offset_lattice(ambient: &Ambient, a: &QuadInt, b: &QuadInt) -> Result<Lattice2> {
    let (o1, o2) = ambient.orders();
    let mut gens = Vec::new();
    if !b.is_zero() {
        gens.push((b.clone(), o1));
    }
    if !a.is_zero() {
        gens.push((a.clone(), o2));
    }
    Lattice2::span_mixed(&gens)
}

impl CurveOnSquare {
    /// Builds `E(a,b) + base`. On the maximal square the stored slope is the
    /// normalized direction; otherwise the given slope is kept.
    pub fn new(ambient: Ambient, slope: (QuadInt, QuadInt), base: &RatVec) -> Result<Self> {
        let (a, b) = slope;
        ambient.tag.check_same(a.tag())?;
        ambient.tag.check_same(b.tag())?;
        if a.is_zero() && b.is_zero() {
            return Err(Error::domain("slope vector (0, 0)"));
        }
        if base.len() != 4 {
            return Err(Error::domain("a point of the square has four coordinates"));
        }
        let dir = normalize_direction(&a, &b)?;
        let m = offset_lattice(&ambient, &dir.0, &dir.1)?;
        let offset = m.reduce(&psi(&dir.0, &dir.1, base));
        let canonical = ambient.is_maximal();
        let slope = if canonical { dir.clone() } else { (a, b) };
        let base = TorsionPoint::new(&ambient, canonical_base(&dir, &offset)?)?;
        Ok(CurveOnSquare {
            ambient,
            slope,
            base,
            canonical,
            key: CurveKey { dir, offset },
            offset_lattice: m,
        })
    }

    /// `E(a,b)` through the origin.
    pub fn through_origin(ambient: Ambient, a: QuadInt, b: QuadInt) -> Result<Self> {
        Self::new(ambient, (a, b), &RatVec::zeros(4))
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn slope(&self) -> (&QuadInt, &QuadInt) {
        (&self.slope.0, &self.slope.1)
    }

    pub fn direction(&self) -> (&QuadInt, &QuadInt) {
        (&self.key.dir.0, &self.key.dir.1)
    }

    pub fn base(&self) -> &TorsionPoint {
        &self.base
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn key(&self) -> &CurveKey {
        &self.key
    }

    pub fn passes_through_origin(&self) -> bool {
        self.key.offset.is_zero()
    }

    /// `psi(X) - psi(base)` lies in `b*O_{m1} + a*O_{m2}`.
    pub fn contains_point(&self, x: &TorsionPoint) -> bool {
        let (a, b) = self.direction();
        let diff = psi(a, b, x.coords()).sub(&self.key.offset);
        self.offset_lattice.contains_vec(&diff)
    }

    /// Slopes are proportional over the field.
    pub fn is_parallel(&self, other: &CurveOnSquare) -> bool {
        self.key.dir == other.key.dir
    }

    /// The translate by a torsion point.
    pub fn translate(&self, t: &TorsionPoint) -> Result<CurveOnSquare> {
        let base = self.base.coords().add(t.coords());
        CurveOnSquare::new(self.ambient, self.slope.clone(), &base)
    }

    /// `pi_1 = a^-1 O_{m1} intersect b^-1 O_{m2}` for the stored slope.
    pub fn fundamental_group(&self) -> Result<Lattice2> {
        let (a, b) = self.slope();
        let (o1, o2) = self.ambient.orders();
        let l1 = Lattice2::of_order(o1);
        let l2 = Lattice2::of_order(o2);
        match (a.is_zero(), b.is_zero()) {
            (false, true) => l1.divided_by(a),
            (true, false) => l2.divided_by(b),
            _ => l1.divided_by(a)?.intersect(&l2.divided_by(b)?),
        }
    }
}

/// The point of the curve picked as its stored base: `(0, -r/a)` or `(r/b, 0)`.
fn canonical_base(dir: &(QuadInt, QuadInt), r: &RatVec) -> Result<RatVec> {
    let (a, b) = dir;
    if !a.is_zero() {
        Ok(RatVec::zeros(2).concat(&r.div_quad(a)?.neg()))
    } else {
        Ok(r.div_quad(b)?.concat(&RatVec::zeros(2)))
    }
}

/// Set equality of two curves on the same square.
pub fn curve_eq(c1: &CurveOnSquare, c2: &CurveOnSquare) -> bool {
    c1.ambient == c2.ambient && c1.is_parallel(c2) && c1.contains_point(c2.base())
}

/// The `4 x 4` integer matrix of `X -> (psi_1(X), psi_2(X))`.
fn psi_pair_matrix(d1: &(QuadInt, QuadInt), d2: &(QuadInt, QuadInt)) -> IntMatrix {
    let blocks = [
        [d1.1.mul_matrix(), (-&d1.0).mul_matrix()],
        [d2.1.mul_matrix(), (-&d2.0).mul_matrix()],
    ];
    let mut m = IntMatrix::zeros(4, 4);
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, blk) in row.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    m.set(2 * bi + i, 2 * bj + j, blk.get(i, j).clone());
                }
            }
        }
    }
    m
}

/// Solver for intersections of curves with two fixed directions.
#[derive(Clone, Debug)]
pub struct PairSolver {
    solver: ModSolver,
}

impl PairSolver {
    pub fn new(c1: &CurveOnSquare, c2: &CurveOnSquare) -> Result<Self> {
        let a = psi_pair_matrix(&c1.key.dir, &c2.key.dir);
        let target = Lattice4::product(&c1.offset_lattice, &c2.offset_lattice)?;
        let source = c1.ambient.lattice();
        let solver = ModSolver::new(&a, target.zlattice(), source.zlattice())?;
        Ok(PairSolver { solver })
    }

    pub fn count(&self) -> usize {
        self.solver.count()
    }

    pub fn points(&self, c1: &CurveOnSquare, c2: &CurveOnSquare) -> Vec<TorsionPoint> {
        let rhs = c1.key.offset.concat(&c2.key.offset);
        self.solver
            .solve(&rhs)
            .into_iter()
            .map(|coords| TorsionPoint { coords })
            .collect()
    }
}

/// Common points of two non-parallel curves, sorted canonically.
pub fn intersect_curves(c1: &CurveOnSquare, c2: &CurveOnSquare) -> Result<Vec<TorsionPoint>> {
    if c1.ambient != c2.ambient {
        return Err(Error::domain("curves live on different squares"));
    }
    if c1.is_parallel(c2) {
        return Err(Error::ParallelCurves {
            identical: curve_eq(c1, c2),
        });
    }
    Ok(PairSolver::new(c1, c2)?.points(c1, c2))
}

/// A finite set of distinct curves on one square.
#[derive(Clone, Debug)]
pub struct Configuration {
    ambient: Ambient,
    curves: Vec<CurveOnSquare>,
}

impl PartialEq for Configuration {
    /// Set equality of the curve lists.
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.key_set() == other.key_set()
    }
}

impl Eq for Configuration {}

impl Configuration {
    pub fn new(ambient: Ambient, curves: Vec<CurveOnSquare>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, c) in curves.iter().enumerate() {
            if c.ambient != ambient {
                return Err(Error::domain(format!("curve {i} lives on a different square")));
            }
            if !seen.insert(c.key.clone()) {
                return Err(Error::domain(format!(
                    "curve {i} duplicates an earlier curve of the configuration"
                )));
            }
        }
        Ok(Configuration { ambient, curves })
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn curves(&self) -> &[CurveOnSquare] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    fn key_set(&self) -> BTreeSet<&CurveKey> {
        self.curves.iter().map(|c| &c.key).collect()
    }

    /// Curves sorted by the coordinates of their slope entries, then base.
    pub fn canonical_order(&self) -> Configuration {
        let mut curves = self.curves.clone();
        curves.sort_by(|p, q| sort_key(p).cmp(&sort_key(q)));
        Configuration {
            ambient: self.ambient,
            curves,
        }
    }

    pub fn translate(&self, t: &TorsionPoint) -> Result<Configuration> {
        let curves = self
            .curves
            .iter()
            .map(|c| c.translate(t))
            .collect::<Result<_>>()?;
        Configuration::new(self.ambient, curves)
    }

    pub fn singular_locus(&self) -> Result<SingularLocusReport> {
        singular_locus(self)
    }
}

fn sort_key(c: &CurveOnSquare) -> (Int, Int, Int, Int, RatVec) {
    let (a, b) = c.slope();
    (
        a.y_map(),
        a.x_map(),
        b.y_map(),
        b.x_map(),
        c.base.coords.clone(),
    )
}

/// A singular point with the indices of the curves through it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularPoint {
    pub point: TorsionPoint,
    pub curves: Vec<usize>,
}

impl SingularPoint {
    pub fn incidence(&self) -> usize {
        self.curves.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularLocusReport {
    pub components: usize,
    pub points: Vec<SingularPoint>,
    /// `|D^sing|`.
    pub singular_count: usize,
    /// `sum_i |D_i cap D^sing|`.
    pub incidence_sum: usize,
    pub proportional: bool,
    /// Proportional only because there are no singular points.
    pub vacuous: bool,
    pub intersecting: bool,
}

impl SingularLocusReport {
    /// Proportional and intersecting: the configuration yields a ball quotient.
    pub fn is_ball_quotient(&self) -> bool {
        self.proportional && self.intersecting
    }
}

/// Pairwise intersections with incidence counts.
pub fn singular_locus(d: &Configuration) -> Result<SingularLocusReport> {
    if d.curves.is_empty() {
        return Err(Error::domain("empty configuration"));
    }
    let mut solvers: HashMap<(usize, usize), PairSolver> = HashMap::new();
    let mut dir_ids: BTreeMap<&(QuadInt, QuadInt), usize> = BTreeMap::new();
    let dir_index: Vec<usize> = d
        .curves
        .iter()
        .map(|c| {
            let n = dir_ids.len();
            *dir_ids.entry(&c.key.dir).or_insert(n)
        })
        .collect();
    let mut points: BTreeMap<TorsionPoint, BTreeSet<usize>> = BTreeMap::new();
    for i in 0..d.curves.len() {
        for j in i + 1..d.curves.len() {
            let (ci, cj) = (&d.curves[i], &d.curves[j]);
            if ci.is_parallel(cj) {
                if ci.key == cj.key {
                    return Err(Error::ParallelCurves { identical: true });
                }
                continue;
            }
            let key = (dir_index[i], dir_index[j]);
            let solver = match solvers.entry(key) {
                std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::hash_map::Entry::Vacant(e) => e.insert(PairSolver::new(ci, cj)?),
            };
            for p in solver.points(ci, cj) {
                let set = points.entry(p).or_default();
                set.insert(i);
                set.insert(j);
            }
        }
    }
    let points: Vec<SingularPoint> = points
        .into_iter()
        .map(|(point, set)| SingularPoint {
            point,
            curves: set.into_iter().collect(),
        })
        .collect();
    let singular_count = points.len();
    let incidence_sum = points.iter().map(SingularPoint::incidence).sum();
    Ok(SingularLocusReport {
        components: d.curves.len(),
        singular_count,
        incidence_sum,
        proportional: incidence_sum == 4 * singular_count,
        vacuous: singular_count == 0,
        intersecting: singular_count > 0,
        points,
    })
}

/// Euler number `|D^sing|`; `meaningful` is false when the configuration is not proportional.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EulerNumber {
    pub value: usize,
    pub meaningful: bool,
}

pub fn euler_number(d: &Configuration) -> Result<EulerNumber> {
    let r = singular_locus(d)?;
    Ok(EulerNumber {
        value: r.singular_count,
        meaningful: r.proportional,
    })
}

/// Volume in units of `8 pi^2 / 3`, which equals the Euler number.
pub fn volume_units(d: &Configuration) -> Result<usize> {
    let r = singular_locus(d)?;
    if !r.proportional {
        return Err(Error::domain(
            "volume is only defined for proportional configurations",
        ));
    }
    Ok(r.singular_count)
}

/// A `2 x 2` matrix over the maximal order, `[[g00, g01], [g10, g11]]`.
pub type Gl2 = [[QuadInt; 2]; 2];

/// Image of a configuration on the maximal square under `g` with unit determinant.
pub fn apply_gl2(g: &Gl2, d: &Configuration) -> Result<Configuration> {
    let amb = *d.ambient();
    if !amb.is_maximal() {
        return Err(Error::domain("GL2 action needs the maximal-order square"));
    }
    for row in g {
        for e in row {
            amb.tag.check_same(e.tag())?;
        }
    }
    let det = &(&g[0][0] * &g[1][1]) - &(&g[0][1] * &g[1][0]);
    if !det.is_unit() {
        return Err(Error::domain(format!("det(g) = {det} is not a unit")));
    }
    let curves = d
        .curves
        .iter()
        .map(|c| {
            let (a, b) = c.slope();
            let a2 = &(&g[0][0] * a) + &(&g[0][1] * b);
            let b2 = &(&g[1][0] * a) + &(&g[1][1] * b);
            let (p, q) = (c.base.first(), c.base.second());
            let p2 = p.mul_quad(&g[0][0]).add(&q.mul_quad(&g[0][1]));
            let q2 = p.mul_quad(&g[1][0]).add(&q.mul_quad(&g[1][1]));
            CurveOnSquare::new(amb, (a2, b2), &p2.concat(&q2))
        })
        .collect::<Result<_>>()?;
    Configuration::new(amb, curves)
}

/// Field norm of `a*d - b*c`, the expected intersection count of coprime
/// slopes on the maximal square.
pub fn determinant_norm(s1: (&QuadInt, &QuadInt), s2: (&QuadInt, &QuadInt)) -> Int {
    (&(s1.0 * s2.1) - &(s1.1 * s2.0)).norm()
}

impl Configuration {
    /// Configuration of curves all through the origin.
    pub fn through_origin(ambient: Ambient, slopes: &[(QuadInt, QuadInt)]) -> Result<Self> {
        let curves = slopes
            .iter()
            .map(|(a, b)| CurveOnSquare::through_origin(ambient, a.clone(), b.clone()))
            .collect::<Result<_>>()?;
        Configuration::new(ambient, curves)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn t3() -> FieldTag {
        FieldTag::new(3).unwrap()
    }

    fn q(x: i64, y: i64) -> QuadInt {
        QuadInt::new(t3(), x, y)
    }

    fn curve(a: QuadInt, b: QuadInt) -> CurveOnSquare {
        CurveOnSquare::through_origin(Ambient::maximal(t3()), a, b).unwrap()
    }

    #[test]
    fn normalization() {
        let c = curve(q(2, 0), q(0, 2));
        assert_eq!(c.slope(), (&q(1, 0), &q(0, 1)));
        assert!(c.is_canonical());
        assert!(curve_eq(&curve(q(1, 1), q(1, 1)), &curve(q(2, 2), q(2, 2))));
        assert!(!curve_eq(&curve(q(1, 0), q(0, 0)), &curve(q(0, 0), q(1, 0))));
    }

    #[test]
    fn axes_meet_once() {
        let pts = intersect_curves(&curve(q(1, 0), q(0, 0)), &curve(q(0, 0), q(1, 0))).unwrap();
        assert_eq!(pts, vec![TorsionPoint::origin()]);
        let pts = intersect_curves(&curve(q(1, 0), q(1, 0)), &curve(q(1, 0), q(0, 1))).unwrap();
        assert_eq!(pts, vec![TorsionPoint::origin()]);
    }

    #[test]
    fn parallel_is_an_error() {
        let a = curve(q(1, 0), q(1, 0));
        let e = intersect_curves(&a, &a.clone()).unwrap_err();
        assert_eq!(e, Error::ParallelCurves { identical: true });
        let half = RatVec::new(vec![Int::from(1), Int::zero(), Int::zero(), Int::zero()], Int::from(2));
        let b = CurveOnSquare::new(Ambient::maximal(t3()), (q(1, 0), q(1, 0)), &half).unwrap();
        let e = intersect_curves(&a, &b).unwrap_err();
        assert_eq!(e, Error::ParallelCurves { identical: false });
    }

    #[test]
    fn fundamental_groups() {
        let o = Lattice2::maximal(t3());
        assert_eq!(curve(q(1, 0), q(0, 0)).fundamental_group().unwrap(), o);
        assert_eq!(curve(q(1, 0), q(1, 0)).fundamental_group().unwrap(), o);
    }

    #[test]
    fn duplicates_rejected() {
        let amb = Ambient::maximal(t3());
        let r = Configuration::new(amb, vec![curve(q(1, 0), q(1, 0)), curve(q(3, 0), q(3, 0))]);
        assert!(r.is_err());
    }

    #[test]
    fn single_curve_is_vacuous() {
        let d = Configuration::new(Ambient::maximal(t3()), vec![curve(q(1, 0), q(0, 0))]).unwrap();
        let r = singular_locus(&d).unwrap();
        assert!(r.proportional && r.vacuous && !r.intersecting);
        assert_eq!(euler_number(&d).unwrap().value, 0);
    }

    #[test]
    fn non_unit_determinant_rejected() {
        let d = Configuration::new(Ambient::maximal(t3()), vec![curve(q(1, 0), q(0, 0))]).unwrap();
        let g = [[q(2, 0), q(0, 0)], [q(0, 0), q(1, 0)]];
        assert!(apply_gl2(&g, &d).is_err());
    }
}
