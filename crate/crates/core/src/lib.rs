//! Exact computation in the field of rational functions `ℚ(X_1, X_2, …)`
//! ordered so that every `X_{n+1}` is infinitely larger than `X_n`, with its
//! infinite-rank valuation, power series over it and local inversion.

pub mod calculus;
pub mod error;
pub mod field;
pub mod gamma;
pub mod inverse;
pub mod poly;
pub mod series;
pub mod sturm;
pub mod text;
pub mod valuation;

pub use error::{Error, ParseError, Result, Span};
pub use field::FieldElem;
pub use gamma::GammaVal;
pub use poly::{Coeff, Monomial, Poly, Sign};
pub use series::{DistBracket, NormValue, PowerSeries, Verdict, DEFAULT_DEPTH};
pub use valuation::{dist, phi_index, residue, val, Ball, DyadicDist};
pub use calculus::{
    classify_extremum, first_nonvanishing_order, monotone_certificate, ExtremumReport,
    ExtremumVerdict, MonotoneCertificate, MonotoneOutcome, OrderSearch,
};
pub use inverse::{
    compose_residual, divided_difference_expansion, inversion_domain, picard_invert,
    series_reversion_oracle, DividedDifference, InversionCertificate, InversionDomain,
};
