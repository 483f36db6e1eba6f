//! Path-polynomial expectations, concentration bounds, goodness of fit and the
//! translation identity.

pub mod bounds;
pub mod fit;
pub mod kimvu;
pub mod translation;

pub use bounds::{chernoff_bound, mcdiarmid_bound, schedule_mass, ScheduleGrid, ScheduleMass};
pub use fit::{
    chi_square_binomial, chi_square_fit, chi_square_uniformity, containment_rate, tally, FitCell, FitResult,
    RateEstimate, SampleCounts,
};
pub use kimvu::{inclusion_probability, kim_vu_report, path_polynomial_stats, KimVuReport, PolynomialStat};
pub use translation::{translation_check, PairPredicate, ThresholdMass, TranslationReport};

/// Exact rationals as `"a/b"` strings.
pub(crate) mod ratio_str {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

pub(crate) mod ratio_vec {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?.into_iter().map(|s| s.parse().map_err(D::Error::custom)).collect()
    }
}
