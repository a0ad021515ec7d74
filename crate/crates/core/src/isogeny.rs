//! Diagonal isogenies `diag(alpha, beta): E_{m1} x E_{m2} -> E x E`, pull-backs
//! of curves and configurations, component counts, and isogeny series.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::catalog;
use crate::error::{Error, Result};
use crate::geometry::{singular_locus, Ambient, Configuration, CurveOnSquare, SingularLocusReport};
use crate::intmat::{snf, Int, IntMatrix};
use crate::lattice::{Lattice2, RatVec};
use crate::quad::{FieldTag, OrderRef, QuadInt};

/// `diag(alpha, beta)` from `E_{m1} x E_{m2}` onto the maximal square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalIsogeny {
    alpha: QuadInt,
    beta: QuadInt,
    source: Ambient,
}

impl DiagonalIsogeny {
    pub fn new(alpha: QuadInt, beta: QuadInt, m1: u64, m2: u64) -> Result<Self> {
        let tag = alpha.tag();
        tag.check_same(beta.tag())?;
        if alpha.is_zero() || beta.is_zero() {
            return Err(Error::domain("isogeny entries must be nonzero"));
        }
        let source = Ambient::new(tag, m1, m2)?;
        Ok(DiagonalIsogeny {
            alpha,
            beta,
            source,
        })
    }

    pub fn identity(tag: FieldTag) -> Self {
        Self::new(QuadInt::one(tag), QuadInt::one(tag), 1, 1).expect("identity")
    }

    pub fn tag(&self) -> FieldTag {
        self.alpha.tag()
    }

    pub fn alpha(&self) -> &QuadInt {
        &self.alpha
    }

    pub fn beta(&self) -> &QuadInt {
        &self.beta
    }

    pub fn source(&self) -> Ambient {
        self.source
    }

    pub fn target(&self) -> Ambient {
        Ambient::maximal(self.tag())
    }

    /// `m1 * m2 * N(alpha) * N(beta)`.
    pub fn degree(&self) -> Int {
        let (m1, m2) = self.source.conductors();
        Int::from(m1) * Int::from(m2) * self.alpha.norm() * self.beta.norm()
    }

    fn check_target(&self, f: &CurveOnSquare) -> Result<()> {
        if *f.ambient() != self.target() {
            return Err(Error::domain(
                "the curve must live on the maximal-order square of the same field",
            ));
        }
        Ok(())
    }

    /// `a*beta*O_{m2} + b*alpha*O_{m1}`.
    pub fn lambda_lattice(&self, f: &CurveOnSquare) -> Result<Lattice2> {
        self.check_target(f)?;
        let (a, b) = f.slope();
        let (o1, o2) = self.source.orders();
        let mut gens = Vec::new();
        if !a.is_zero() {
            gens.push((a * &self.beta, o2));
        }
        if !b.is_zero() {
            gens.push((b * &self.alpha, o1));
        }
        let lam = Lattice2::span_mixed(&gens)?;
        let whole = Lattice2::maximal(self.tag());
        if !whole.zlattice().contains_lattice(lam.zlattice()) {
            return Err(Error::internal("lambda lattice is not inside the maximal order"));
        }
        Ok(lam)
    }

    /// Number of components of the pull-back: `[O : Lambda(F, mu)]`.
    pub fn component_count_lattice(&self, f: &CurveOnSquare) -> Result<Int> {
        self.lambda_lattice(f)?.index_in_maximal()
    }

    /// Closed-form count for equal conductors from `delta = gcd(a*beta, b*alpha)`
    /// and the coordinates of `xi = a*beta/delta`, `eta = b*alpha/delta`.
    pub fn component_count_closed_form(&self, f: &CurveOnSquare) -> Result<ClosedFormCount> {
        self.check_target(f)?;
        let (m1, m2) = self.source.conductors();
        if m1 != m2 {
            return Err(Error::Unsupported(
                "closed form needs equal source conductors".into(),
            ));
        }
        let (a, b) = f.slope();
        closed_form_count(&(a * &self.beta), &(b * &self.alpha), m1)
    }

    fn bezout_for(f: &CurveOnSquare) -> Result<(QuadInt, QuadInt)> {
        let (a, b) = f.slope();
        a.bezout(b)
    }

    /// Components of `mu^-1(F)`, one per coset `lambda` of `Lambda(F, mu)` in `O`:
    /// `E(a*beta, b*alpha) + ((p + b0*lambda)/alpha, (q - a0*lambda)/beta)`.
    pub fn pullback_curve(&self, f: &CurveOnSquare) -> Result<PullbackDecomposition> {
        let (a0, b0) = Self::bezout_for(f)?;
        self.pullback_curve_with_bezout(f, &a0, &b0)
    }

    /// As `pullback_curve`, with a caller-supplied pair `a*a0 + b*b0 = 1`.
    pub fn pullback_curve_with_bezout(
        &self,
        f: &CurveOnSquare,
        a0: &QuadInt,
        b0: &QuadInt,
    ) -> Result<PullbackDecomposition> {
        self.check_target(f)?;
        let tag = self.tag();
        let (a, b) = f.slope();
        if &(a * a0) + &(b * b0) != QuadInt::one(tag) {
            return Err(Error::domain("(a0, b0) is not a Bezout pair for the slope"));
        }
        let lam = self.lambda_lattice(f)?;
        let count = lam.index_in_maximal()?;
        let reps = Lattice2::coset_elements(&lam, &Lattice2::maximal(tag))?;
        let (p, q) = (f.base().first(), f.base().second());
        let slope = (a * &self.beta, b * &self.alpha);
        let mut components = Vec::with_capacity(reps.len());
        for l in &reps {
            let u = p.add(&RatVec::from_ints((b0 * l).coords().to_vec())).div_quad(&self.alpha)?;
            let v = q.sub(&RatVec::from_ints((a0 * l).coords().to_vec())).div_quad(&self.beta)?;
            components.push(CurveOnSquare::new(self.source, slope.clone(), &u.concat(&v))?);
        }
        if Int::from(components.len()) != count {
            return Err(Error::internal("coset enumeration disagrees with the index"));
        }
        // rejects coinciding components
        let components = Configuration::new(self.source, components)
            .map_err(|e| Error::internal(format!("pull-back components coincide: {e}")))?
            .curves()
            .to_vec();
        let closed_form = self.component_count_closed_form(f).ok();
        Ok(PullbackDecomposition {
            components,
            count,
            lambda_lattice: lam,
            closed_form,
        })
    }

    /// Union of the curve pull-backs, without verifying the image.
    pub fn pullback_components(&self, d: &Configuration) -> Result<Configuration> {
        let mut curves = Vec::new();
        for f in d.curves() {
            curves.extend(self.pullback_curve(f)?.components);
        }
        Configuration::new(self.source, curves)
    }

    /// Pull-back of a proportional configuration, checked to be proportional
    /// with `degree * |D^sing|` singular points.
    pub fn pullback_configuration(&self, d: &Configuration) -> Result<Configuration> {
        Ok(self.pullback_verified(d)?.0)
    }

    /// The pulled-back configuration with the singular-locus reports of
    /// target and source.
    pub fn pullback_verified(
        &self,
        d: &Configuration,
    ) -> Result<(Configuration, SingularLocusReport, SingularLocusReport)> {
        let before = singular_locus(d)?;
        if !before.proportional {
            return Err(Error::domain("the configuration to pull back is not proportional"));
        }
        let pulled = self.pullback_components(d)?;
        let after = singular_locus(&pulled)?;
        if !after.proportional {
            return Err(Error::internal("pull-back of a proportional configuration is not proportional"));
        }
        if Int::from(after.singular_count) != self.degree() * Int::from(before.singular_count) {
            return Err(Error::internal(format!(
                "pull-back has {} singular points, expected {} * {}",
                after.singular_count,
                self.degree(),
                before.singular_count
            )));
        }
        Ok((pulled, before, after))
    }
}

/// Which branch of the closed form applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexCase {
    /// Both coordinate pairs nonzero: `|delta|^2 gcd(x_o, m) gcd(y_o, m)`.
    Mixed,
    /// `y(xi) = y(eta) = 0`: `m |delta|^2 gcd(x_o, m)`.
    XOnly,
    /// `x(xi) = x(eta) = 0`: `m |delta|^2 gcd(y_o, m)`.
    YOnly,
}

impl IndexCase {
    pub fn name(self) -> &'static str {
        match self {
            IndexCase::Mixed => "mixed",
            IndexCase::XOnly => "x-only",
            IndexCase::YOnly => "y-only",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormCount {
    pub count: Int,
    pub case: IndexCase,
}

/// The `m`-independent data of the closed form: `delta = gcd(g1, g2)` and the
/// coordinates of `xi = g1/delta`, `eta = g2/delta`.
#[derive(Clone, Debug)]
pub struct ClosedFormData {
    delta_norm: Int,
    xs_zero: bool,
    ys_zero: bool,
    x_o: Int,
    y_o: Int,
    invariants: (Int, Int),
}

impl ClosedFormData {
    pub fn new(g1: &QuadInt, g2: &QuadInt) -> Result<Self> {
        let delta = g1.gcd(g2)?;
        if delta.is_zero() {
            return Err(Error::domain("both generators vanish"));
        }
        let xi = g1.div_exact(&delta)?.expect("gcd divides");
        let eta = g2.div_exact(&delta)?.expect("gcd divides");
        let (x1, x2, y1, y2) = (xi.x_map(), eta.x_map(), xi.y_map(), eta.y_map());
        let c = IntMatrix::from_rows(&[vec![x1.clone(), x2.clone()], vec![y1.clone(), y2.clone()]]);
        let s = snf(&c).diagonal();
        Ok(ClosedFormData {
            delta_norm: delta.norm(),
            xs_zero: x1.is_zero() && x2.is_zero(),
            ys_zero: y1.is_zero() && y2.is_zero(),
            x_o: x1.gcd(&x2),
            y_o: y1.gcd(&y2),
            invariants: (s[0].clone(), s[1].clone()),
        })
    }

    /// The three-case count: `|delta|^2 gcd(x_o, m) gcd(y_o, m)` when both
    /// coordinate pairs are nonzero, `m |delta|^2 gcd(x_o, m)` when the
    /// `y`-coordinates vanish, `m |delta|^2 gcd(y_o, m)` when the `x`-coordinates do.
    pub fn count(&self, m: u64) -> ClosedFormCount {
        let m = Int::from(m);
        let (xo, yo) = (&self.x_o, &self.y_o);
        let dn = &self.delta_norm;
        let (count, case) = match (self.xs_zero, self.ys_zero) {
            (false, false) => (dn * xo.gcd(&m) * yo.gcd(&m), IndexCase::Mixed),
            (false, true) => (&m * dn * xo.gcd(&m), IndexCase::XOnly),
            (true, false) => (&m * dn * yo.gcd(&m), IndexCase::YOnly),
            (true, true) => unreachable!("xi and eta are coprime"),
        };
        ClosedFormCount { count, case }
    }

    /// `|delta|^2 gcd(s1, m) gcd(s2, m)` with `s1 | s2` the invariant factors of
    /// `[[x(xi), x(eta)], [y(xi), y(eta)]]`. This accounts for the joint image
    /// of both coordinates modulo `m`.
    pub fn invariant_factor_count(&self, m: u64) -> Int {
        let m = Int::from(m);
        &self.delta_norm * self.invariants.0.gcd(&m) * self.invariants.1.gcd(&m)
    }
}

/// Closed form for `[O : g1*O_m + g2*O_m]`, split into the three coordinate cases.
pub fn closed_form_count(g1: &QuadInt, g2: &QuadInt, m: u64) -> Result<ClosedFormCount> {
    Ok(ClosedFormData::new(g1, g2)?.count(m))
}

/// See [`ClosedFormData::invariant_factor_count`].
pub fn invariant_factor_count(g1: &QuadInt, g2: &QuadInt, m: u64) -> Result<Int> {
    Ok(ClosedFormData::new(g1, g2)?.invariant_factor_count(m))
}

#[derive(Clone, Debug)]
pub struct PullbackDecomposition {
    pub components: Vec<CurveOnSquare>,
    pub count: Int,
    pub lambda_lattice: Lattice2,
    /// Closed-form count, when its hypotheses hold.
    pub closed_form: Option<ClosedFormCount>,
}

/// One term of an isogeny series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTermRecord {
    pub n: usize,
    pub degree_step: Int,
    pub degree_total: Int,
    /// Euler number, computed from the singular locus.
    pub e: Int,
    /// Volume in units of `8 pi^2 / 3`.
    pub volume_units: Int,
    /// Number of components (cusps), computed from the configuration.
    pub h: Int,
    /// Conductor of the source square; differs between non-birational terms.
    pub conductor: u64,
    pub formula_e: Option<Int>,
    pub formula_h: Option<Int>,
}

impl SeriesTermRecord {
    pub fn mismatch(&self) -> bool {
        self.formula_h.as_ref().is_some_and(|h| *h != self.h)
            || self.formula_e.as_ref().is_some_and(|e| *e != self.e)
    }
}

#[derive(Clone, Debug)]
pub struct Series {
    pub base: SeriesTermRecord,
    pub terms: Vec<SeriesTermRecord>,
}

fn base_record(d: &Configuration) -> Result<SeriesTermRecord> {
    let r = singular_locus(d)?;
    if !r.proportional {
        return Err(Error::domain("series base is not proportional"));
    }
    let e = Int::from(r.singular_count);
    Ok(SeriesTermRecord {
        n: 0,
        degree_step: Int::one(),
        degree_total: Int::one(),
        volume_units: e.clone(),
        e,
        h: Int::from(r.components),
        conductor: d.ambient().conductors().0,
        formula_e: None,
        formula_h: None,
    })
}

fn record_from(
    n: usize,
    mu: &DiagonalIsogeny,
    degree_total: &Int,
    base_e: &Int,
    after: &SingularLocusReport,
) -> Result<SeriesTermRecord> {
    let e = Int::from(after.singular_count);
    if e != degree_total * base_e {
        return Err(Error::internal("Euler number is not degree times the base Euler number"));
    }
    Ok(SeriesTermRecord {
        n,
        degree_step: mu.degree(),
        degree_total: degree_total.clone(),
        volume_units: e.clone(),
        e,
        h: Int::from(after.components),
        conductor: mu.source().conductors().0,
        formula_e: None,
        formula_h: None,
    })
}

/// Composes `diag(gamma_n, -1)` step by step on the maximal square of `base`.
pub fn series_gammas(base: &Configuration, gammas: &[QuadInt]) -> Result<Series> {
    let tag = base.ambient().tag();
    if !base.ambient().is_maximal() {
        return Err(Error::domain("series base must live on the maximal-order square"));
    }
    let base_rec = base_record(base)?;
    let mut current = base.clone();
    let mut total = Int::one();
    let mut terms = Vec::with_capacity(gammas.len());
    for (i, g) in gammas.iter().enumerate() {
        tag.check_same(g.tag())?;
        if g.is_zero() || g.is_unit() {
            return Err(Error::domain(format!("gamma_{} = {g} is zero or a unit", i + 1)));
        }
        let mu = DiagonalIsogeny::new(g.clone(), -QuadInt::one(tag), 1, 1)?;
        let (next, _, after) = mu.pullback_verified(&current)?;
        total *= mu.degree();
        terms.push(record_from(i + 1, &mu, &total, &base_rec.e, &after)?);
        current = next;
    }
    Ok(Series {
        base: base_rec,
        terms,
    })
}

fn eisenstein() -> FieldTag {
    FieldTag::new(3).expect("class number one")
}

/// Pull-backs of the Hirzebruch configuration with `h = prod N(gamma) + 3`.
pub fn series_birational(gammas: &[QuadInt]) -> Result<Series> {
    let mut s = series_gammas(&catalog::hirzebruch().configuration, gammas)?;
    for t in &mut s.terms {
        t.formula_e = Some(t.degree_total.clone());
        t.formula_h = Some(&t.degree_total + 3);
    }
    Ok(s)
}

/// `sqrt(-3) = -1 + 2w` divides `g`.
pub fn in_sqrt_minus3_ideal(g: &QuadInt) -> bool {
    let s = QuadInt::new(eisenstein(), -1, 2);
    g.tag() == s.tag() && g.div_exact(&s).ok().flatten().is_some()
}

/// Pull-backs of the modified Hirzebruch configuration with four cusps throughout.
pub fn series_four_cusp(gammas: &[QuadInt]) -> Result<Series> {
    for (i, g) in gammas.iter().enumerate() {
        if in_sqrt_minus3_ideal(g) {
            return Err(Error::domain(format!(
                "gamma_{} = {g} lies in sqrt(-3) O", i + 1
            )));
        }
    }
    let mut s = series_gammas(&catalog::d14().configuration, gammas)?;
    for t in &mut s.terms {
        t.formula_e = Some(t.degree_total.clone());
        t.formula_h = Some(Int::from(4));
    }
    Ok(s)
}

/// Which closed formulas accompany a non-birational series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NonBirationalFormula {
    /// `h = prod k + 1`, as stated for the Hirzebruch base.
    Hirzebruch,
    /// `h = prod k + 2`, as stated for the modified base.
    D14,
    None,
}

/// Pulls `base` back along the identity `E_{m_n}^2 -> E^2` with `m_n = prod_{j<=n} k_j`.
pub fn series_nonbirational(
    ks: &[u64],
    base: &Configuration,
    formula: NonBirationalFormula,
) -> Result<Series> {
    let tag = base.ambient().tag();
    if !base.ambient().is_maximal() {
        return Err(Error::domain("series base must live on the maximal-order square"));
    }
    let base_rec = base_record(base)?;
    let mut m: u64 = 1;
    let mut terms = Vec::with_capacity(ks.len());
    let mut prev_total = Int::one();
    for (i, &k) in ks.iter().enumerate() {
        if k < 2 {
            return Err(Error::domain(format!("k_{} = {k} must be at least 2", i + 1)));
        }
        m = m.checked_mul(k).ok_or_else(|| Error::domain("conductor overflows u64"))?;
        let mu = DiagonalIsogeny::new(QuadInt::one(tag), QuadInt::one(tag), m, m)?;
        let (_, _, after) = mu.pullback_verified(base)?;
        let total = mu.degree();
        let mut rec = record_from(i + 1, &mu, &total, &base_rec.e, &after)?;
        rec.degree_step = &total / &prev_total;
        rec.formula_e = Some(Int::from(m) * Int::from(m));
        rec.formula_h = match formula {
            NonBirationalFormula::Hirzebruch => Some(Int::from(m) + 1),
            NonBirationalFormula::D14 => Some(Int::from(m) + 2),
            NonBirationalFormula::None => None,
        };
        prev_total = total;
        terms.push(rec);
    }
    Ok(Series {
        base: base_rec,
        terms,
    })
}

/// Squares of equal-conductor curves are birational only for equal conductors.
pub fn are_squares_birational(a: OrderRef, b: OrderRef) -> Result<bool> {
    a.tag().check_same(b.tag())?;
    Ok(a.conductor() == b.conductor())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllVolumesRecord {
    pub m: u64,
    pub degree: Int,
    pub e: Int,
    pub h: Int,
}

/// Pull-back of the Hirzebruch configuration along `diag(1,1): E x E_m -> E x E`.
pub fn all_volumes_witness(m: u64) -> Result<AllVolumesRecord> {
    let tag = eisenstein();
    let mu = DiagonalIsogeny::new(QuadInt::one(tag), QuadInt::one(tag), 1, m)?;
    let (_, _, after) = mu.pullback_verified(&catalog::hirzebruch().configuration)?;
    Ok(AllVolumesRecord {
        m,
        degree: mu.degree(),
        e: Int::from(after.singular_count),
        h: Int::from(after.components),
    })
}
