//! Applications of vector-summarization coresets.

pub mod dim;
pub mod kde;
pub mod one_mean;

pub use dim::{dim_coreset, gram_certificate, subspace_cost, DimCoresetResult};
pub use kde::{kde_coreset, kde_value, FeatureMap, IdentityMap, RandomFourierFeatures};
pub use one_mean::{one_mean_certificates, one_mean_coreset, one_mean_cost, OneMeanCertificates};
