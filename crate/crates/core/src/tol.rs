//! Centralized numeric tolerances.
//!
//! Exact-mode (rational) checks never use these; they compare values for
//! equality. The constants below only absorb f64 rounding in float-mode
//! checks, and every consumer states which constant it uses.

/// Identity checks that are exact in real arithmetic (Fourier inversion,
/// Parseval, closed forms): f64 rounding across O(q) term sums stays far
/// below this.
pub const EXACT_EQ: f64 = 1e-12;

/// Direct vs. Fourier-side membership probability agreement in f64 mode.
pub const MEMBERSHIP_AGREE: f64 = 1e-10;

/// Slack for threshold-set membership (Spec sets, level sets): a value whose
/// true magnitude ties the threshold is included, matching the >= in the
/// set definitions, even if rounding lands it a hair below.
pub const SET_SLACK: f64 = 1e-12;

/// Slack for inequalities whose two sides are products of up to ~10^3
/// factors (swap-property level-set inclusions): relative rounding of the
/// product chains, applied additively to quantities of order one.
pub const PRODUCT_SLACK: f64 = 1e-9;

/// Monte Carlo acceptance half-width in standard errors.
pub const MC_SIGMAS: f64 = 3.0;
