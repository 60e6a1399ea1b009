//! Punctuation and sentence-length statistics for plain-text corpora.
//!
//! The crate turns text into interval series ([`corpus`]), models those
//! intervals with the discrete Weibull distribution ([`weibull`]), measures
//! long-range correlations and multifractality with MFDFA ([`mfdfa`]), and
//! provides synthetic signals with known scaling for validation
//! ([`surrogate`]).

pub mod corpus;
pub mod export;
pub mod mfdfa;
mod optimize;
pub mod rng;
pub mod surrogate;
pub mod weibull;

pub use corpus::{
    extract_ipi, extract_slv, punctuation_profile, tokenize, IntervalSeries, MarkClass,
    PunctuationConfig, PunctuationProfile, SeriesKind, Token, TokenKind, TokenStream,
};
pub use mfdfa::{
    fluctuation_surface, hurst, singularity_spectrum, FluctuationSurface, MfdfaConfig, MfdfaError,
    SingularitySpectrum,
};
pub use optimize::SimplexOptions;
pub use surrogate::{binomial_cascade, persistent_noise, shuffle, white_noise, CascadeSpec};
pub use weibull::{
    empirical_hazard, fit_mle, HazardCurve, WeibullError, WeibullFit, WeibullParams,
};
