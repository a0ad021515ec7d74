//! Built-in proportional configurations used as fixtures.

use crate::error::{Error, Result};
use crate::geometry::{singular_locus, Ambient, Configuration, CurveOnSquare, SingularLocusReport};
use crate::intmat::Int;
use crate::lattice::RatVec;
use crate::quad::{FieldTag, QuadInt};

/// Invariants a fixture is expected to have.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Expected {
    pub components: usize,
    pub singular_points: usize,
    pub proportional: bool,
    pub e: usize,
}

#[derive(Clone, Debug)]
pub struct NamedConfiguration {
    pub key: &'static str,
    pub description: &'static str,
    pub configuration: Configuration,
    pub expected: Expected,
}

impl NamedConfiguration {
    /// Recomputes the singular locus and compares it with the expected block.
    pub fn validate(&self) -> Result<SingularLocusReport> {
        let r = singular_locus(&self.configuration)?;
        let got = Expected {
            components: r.components,
            singular_points: r.singular_count,
            proportional: r.proportional,
            e: r.singular_count,
        };
        if got != self.expected {
            return Err(Error::internal(format!(
                "fixture {} computes {got:?}, expected {:?}",
                self.key, self.expected
            )));
        }
        Ok(r)
    }
}

pub const KEYS: [&str; 3] = ["hirzebruch", "d14", "holzapfel"];

fn eisenstein() -> FieldTag {
    FieldTag::new(3).expect("3 is class number one")
}

fn gaussian() -> FieldTag {
    FieldTag::new(1).expect("1 is class number one")
}

fn build(tag: FieldTag, curves: &[((i64, i64), (i64, i64), [(i64, i64); 4])]) -> Configuration {
    let amb = Ambient::maximal(tag);
    let curves = curves
        .iter()
        .map(|&((ax, ay), (bx, by), base)| {
            let base: Vec<(Int, Int)> = base.iter().map(|&(p, q)| (Int::from(p), Int::from(q))).collect();
            CurveOnSquare::new(
                amb,
                (QuadInt::new(tag, ax, ay), QuadInt::new(tag, bx, by)),
                &RatVec::from_fractions(&base).expect("nonzero denominators"),
            )
            .expect("fixture curve")
        })
        .collect();
    Configuration::new(amb, curves).expect("fixture curves are distinct")
}

const O: [(i64, i64); 4] = [(0, 1), (0, 1), (0, 1), (0, 1)];

/// `(0, (1+i)/2)` on the Gaussian square.
const Q03: [(i64, i64); 4] = [(0, 1), (0, 1), (1, 2), (1, 2)];

/// Four curves through the origin of the Eisenstein square with slopes
/// `(1,0), (0,1), (1,1), (1,w)`, where `w = e^{i pi/3}`.
pub fn hirzebruch() -> NamedConfiguration {
    NamedConfiguration {
        key: "hirzebruch",
        description: "Hirzebruch's configuration on E_-3 x E_-3",
        configuration: build(
            eisenstein(),
            &[((1, 0), (0, 0), O), ((0, 0), (1, 0), O), ((1, 0), (1, 0), O), ((1, 0), (0, 1), O)],
        ),
        expected: Expected {
            components: 4,
            singular_points: 1,
            proportional: true,
            e: 1,
        },
    }
}

/// Image of the Hirzebruch configuration under `[[1, w], [0, 1]]`: slopes
/// `(1,0), (w,1), (sqrt(-3) e^{-i pi/3}, 1) = (1+w, 1), (1,1)`.
pub fn d14() -> NamedConfiguration {
    NamedConfiguration {
        key: "d14",
        description: "Hirzebruch's configuration moved off the E(0,1) direction",
        configuration: build(
            eisenstein(),
            &[((1, 0), (0, 0), O), ((0, 1), (1, 0), O), ((1, 1), (1, 0), O), ((1, 0), (1, 0), O)],
        ),
        expected: Expected {
            components: 4,
            singular_points: 1,
            proportional: true,
            e: 1,
        },
    }
}

/// Holzapfel's six curves on the Gaussian square, two of them translated by `Q03`.
pub fn holzapfel() -> NamedConfiguration {
    NamedConfiguration {
        key: "holzapfel",
        description: "Holzapfel's configuration on E_-1 x E_-1",
        configuration: build(
            gaussian(),
            &[
                ((1, 0), (0, 0), O),
                ((0, 0), (1, 0), O),
                ((-1, 0), (1, 0), Q03),
                ((-1, -1), (1, 0), O),
                ((-1, 0), (1, -1), O),
                ((0, -1), (1, 0), Q03),
            ],
        ),
        expected: Expected {
            components: 6,
            singular_points: 3,
            proportional: true,
            e: 3,
        },
    }
}

/// Looks up a fixture by key and validates it.
pub fn lookup(key: &str) -> Result<NamedConfiguration> {
    let nc = match key {
        "hirzebruch" => hirzebruch(),
        "d14" => d14(),
        "holzapfel" => holzapfel(),
        _ => {
            return Err(Error::Parse(format!(
                "unknown catalog key {key:?}; known keys: {}",
                KEYS.join(", ")
            )))
        }
    };
    nc.validate()?;
    Ok(nc)
}

/// The torsion points `Q00`, `Q03`, `Q30` of the Gaussian square.
pub fn holzapfel_points() -> [RatVec; 3] {
    let half = |v: [i64; 4]| RatVec::new(v.iter().map(|&x| Int::from(x)).collect(), Int::from(2));
    [half([0, 0, 0, 0]), half([0, 0, 1, 1]), half([1, 1, 0, 0])]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply_gl2, curve_eq};

    #[test]
    fn fixtures_self_validate() {
        for k in KEYS {
            lookup(k).unwrap();
        }
        assert!(lookup("nope").is_err());
    }

    #[test]
    fn transcendental_slopes_match_coordinates() {
        let t = eisenstein();
        let w = QuadInt::omega(t).to_complex();
        let pi3 = std::f64::consts::PI / 3.0;
        assert!((w.0 - pi3.cos()).abs() < 1e-12 && (w.1 - pi3.sin()).abs() < 1e-12);
        // sqrt(-3) * e^{-i pi/3}
        let s3 = 3f64.sqrt();
        let (re, im) = (s3 * pi3.sin(), s3 * pi3.cos());
        let one_w = QuadInt::new(t, 1, 1).to_complex();
        assert!((re - one_w.0).abs() < 1e-12 && (im - one_w.1).abs() < 1e-12);
    }

    #[test]
    fn d14_is_the_image_of_hirzebruch() {
        let t = eisenstein();
        let g = [
            [QuadInt::one(t), QuadInt::omega(t)],
            [QuadInt::zero(t), QuadInt::one(t)],
        ];
        let img = apply_gl2(&g, &hirzebruch().configuration).unwrap();
        assert_eq!(img, d14().configuration);
        for c in img.curves() {
            assert!(d14().configuration.curves().iter().any(|e| curve_eq(c, e)));
        }
    }

    #[test]
    fn holzapfel_singular_set() {
        let r = holzapfel().validate().unwrap();
        let got: Vec<RatVec> = r.points.iter().map(|p| p.point.coords().clone()).collect();
        let mut want = holzapfel_points().to_vec();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(r.incidence_sum, 12);
    }
}
