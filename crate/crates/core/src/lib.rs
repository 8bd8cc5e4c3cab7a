//! Singularity statistics of dense random matrices over finite fields:
//! exact F_q arithmetic, probability measures with their Fourier analysis,
//! Littlewood-Offord walk distributions, subspace classification, and
//! reproducible Monte Carlo / exact-enumeration experiments, together with a
//! battery of property checks for the inequalities the machinery rests on.
//!
//! Numeric code is generic over [`Scalar`], with two concrete modes:
//! `f64` for large sweeps and exact rationals ([`Exact`]) for the invariant
//! suites. Concrete aliases for the main parameterized types live at the
//! crate root.

pub mod error;
pub mod fq;
pub mod linalg;
pub mod lo;
pub mod measure;
pub mod rng;
pub mod scalar;
pub mod sets;
pub mod tol;

pub use error::{Error, Result};
pub use fq::{
    enumerate_additive_subgroups, field_from_descriptor, make_field, AdditiveSubgroup, Character,
    FieldDescriptor, FieldElement, FieldSpec,
};
pub use linalg::{
    enumerate_subspaces, independence_bound_exact, independence_bound_mc, membership_probability,
    odlyzko_check, random_subspace, sample_matrix, sample_vector, MatrixFq, MeasureSampler,
    MembershipMethod, Subspace, VectorFq,
};
pub use lo::{
    classify_subspace, combinatorial_codimension, combinatorial_codimension_value, cosine_check,
    dot_distribution, f_add_table, f_mult_table, g_mult_table, level_set_report, level_set_t,
    lo_bound_report, psi_table, subgroup_average_check, swap_comparison, t_sumset_check,
    verify_swap_properties, ClassifyConstants, CombCodim, LevelSetReport, SubspaceClass,
    SubspaceLabel, SwapPropertyReport, WalkDistribution, WeightVector,
};
pub use measure::{
    measure_from_json, random_dense_measure, random_exact_measure, Measure, SpecSumsetCheck,
    SpectrumReport,
};
pub use rng::Stream;
pub use sets::{iterated_kneser_check, kneser_check, FqSet, IteratedKneserReport, KneserReport};
pub use scalar::{Cyclo, Scalar};

/// Exact-arithmetic scalar (arbitrary-precision rational).
pub type Exact = num_rational::BigRational;

/// Measure in exact-rational mode.
pub type MeasureExact = Measure<Exact>;
/// Measure in f64 mode.
pub type MeasureF64 = Measure<f64>;

/// Version string recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
