//! Monte Carlo estimation of beta-values.
//!
//! For sample sizes where full enumeration is too expensive, the beta-value
//! is approximated by `N^3` times the integral of a Robbins-corrected
//! Stirling approximation of the emission probability over the acceptance
//! region of the test. The integral is estimated by importance sampling in
//! the unimodular coordinates (p_A, p_B, t): two Gaussians centered on
//! uniform marginals and one Gaussian along the dependence direction,
//! centered on the acceptance boundary. A running variance criterion stops
//! the sampler once the requested relative precision is certified.

use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

use crate::numeric::bisect;
use crate::simplex::{
    mutual_information_cells, path_cells, reference_distribution, t_gamma_minus, t_gamma_plus,
    ContingencyTable, TPath,
};
use crate::stepcdf::StepCdf;
use crate::typespace::{dfs_process, TypePrefix};
use crate::{Error, Result};

/// Probability mass of a standard normal within one standard deviation of
/// its mean; the coverage target that sets the marginal sampling scale.
pub const CENTRAL_ONE_SIGMA: f64 = 0.6826894921;

/// Default iteration cap for a Monte Carlo run.
pub const DEFAULT_MAX_ITERATIONS: u64 = 5_000_000;
/// Default spacing between recorded (iteration, estimate) trace points.
pub const DEFAULT_RECORD_FREQ: u64 = 1_000;
/// Default spacing between evaluations of the stopping criterion.
pub const DEFAULT_STOP_CHECK_FREQ: u64 = 10_000;
/// Default requested relative precision, in percent.
pub const DEFAULT_PRECISION_PERCENT: f64 = 10.0;
/// Default confidence level for the stopping criterion.
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Density ratio between a standard normal at one standard deviation and at
/// its mode; the target ratio that places the acceptance boundary one
/// standard deviation from the sampling center.
fn rho() -> f64 {
    (-0.5f64).exp()
}

/// The integrand parameters: a 2 x 2 problem with reference dependence
/// `eta`, sample size `size`, and test threshold `gamma`.
#[derive(Debug, Clone)]
pub struct IntegrandContext {
    size: u64,
    eta: f64,
    gamma: f64,
    ref_cells: [f64; 4],
    log_ref: [f64; 4],
    robbins_norm: f64,
}

impl IntegrandContext {
    /// Builds a context for sample size `size`, reference mutual information
    /// `eta` in (0, ln 2), and threshold `gamma` in (0, ln 2].
    pub fn new(size: u64, eta: f64, gamma: f64) -> Result<Self> {
        if size < 1 {
            return Err(Error::domain("sample size must be at least 1"));
        }
        let ln2 = std::f64::consts::LN_2;
        if !(eta > 0.0 && eta < ln2) {
            return Err(Error::domain(format!(
                "reference mutual information {eta} must lie in (0, ln 2)"
            )));
        }
        if !(gamma > 0.0 && gamma <= ln2) {
            return Err(Error::domain(format!(
                "threshold {gamma} must lie in (0, ln 2]"
            )));
        }
        let reference = reference_distribution(eta)?;
        let mut ref_cells = [0.0; 4];
        ref_cells.copy_from_slice(reference.cells());
        let log_ref = ref_cells.map(f64::ln);
        let robbins_norm =
            (2.0 * std::f64::consts::PI * size as f64).powf(-1.5);
        Ok(IntegrandContext {
            size,
            eta,
            gamma,
            ref_cells,
            log_ref,
            robbins_norm,
        })
    }

    /// Number of rows of the contingency tables (always 2).
    pub fn k(&self) -> usize {
        2
    }

    /// Number of columns of the contingency tables (always 2).
    pub fn l(&self) -> usize {
        2
    }

    /// The sample size N.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// The reference mutual information.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// The test threshold.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The reference distribution's cells, row-major.
    pub fn reference_cells(&self) -> &[f64; 4] {
        &self.ref_cells
    }
}

/// The importance-sampling parameters: both marginals are drawn from a
/// Gaussian with mean 1/2 and scale `marginal_scale`, the dependence
/// coordinate from a Gaussian centered at `t_center` with scale `t_scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    marginal_scale: f64,
    t_center: f64,
    t_scale: f64,
}

impl SamplingPlan {
    /// Standard deviation of the marginal-probability Gaussians.
    pub fn marginal_scale(&self) -> f64 {
        self.marginal_scale
    }

    /// Mean of the dependence-coordinate Gaussian.
    pub fn t_center(&self) -> f64 {
        self.t_center
    }

    /// Standard deviation of the dependence-coordinate Gaussian.
    pub fn t_scale(&self) -> f64 {
        self.t_scale
    }
}

/// Outcome of a Monte Carlo run: the recorded (iteration, running estimate)
/// trace, the final estimate, and whether the precision criterion fired
/// before the iteration cap.
#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    iterations: Vec<(u64, f64)>,
    final_estimate: f64,
    stopped_by_criterion: bool,
}

impl McResult {
    /// The recorded (iteration index, running estimate) pairs, in order.
    pub fn iterations(&self) -> &[(u64, f64)] {
        &self.iterations
    }

    /// The estimate after the last iteration.
    pub fn final_estimate(&self) -> f64 {
        self.final_estimate
    }

    /// Whether the variance-based criterion stopped the run early.
    pub fn stopped_by_criterion(&self) -> bool {
        self.stopped_by_criterion
    }
}

/// Iteration and stopping parameters of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct McParams {
    /// Hard cap on the number of iterations.
    pub max_iterations: u64,
    /// Spacing between recorded trace points.
    pub record_freq: u64,
    /// Spacing between stopping-criterion checks.
    pub stop_check_freq: u64,
    /// Requested relative precision, in percent.
    pub precision_percent: f64,
    /// Confidence level backing the precision request.
    pub confidence: f64,
}

impl Default for McParams {
    fn default() -> Self {
        McParams {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            record_freq: DEFAULT_RECORD_FREQ,
            stop_check_freq: DEFAULT_STOP_CHECK_FREQ,
            precision_percent: DEFAULT_PRECISION_PERCENT,
            confidence: DEFAULT_CONFIDENCE,
        }
    }
}

/// Rounds the cells of `q` to a frequency vector with denominator `size`,
/// if `q` lies on that lattice.
fn lattice_counts(q: &[f64; 4], size: u64) -> Option<[u64; 4]> {
    let n = size as f64;
    let tolerance = 1e-9 * n.max(1.0);
    let mut counts = [0u64; 4];
    let mut total = 0u64;
    for i in 0..4 {
        let scaled = q[i] * n;
        let rounded = scaled.round();
        if (scaled - rounded).abs() > tolerance || rounded < 0.0 {
            return None;
        }
        counts[i] = rounded as u64;
        total += counts[i];
    }
    (total == size).then_some(counts)
}

/// The extended integrand on raw cells; see [`robbins_integrand`].
fn integrand_cells(q: &[f64; 4], ctx: &IntegrandContext) -> f64 {
    if q.iter().all(|&c| c > 0.0) {
        let mut kl = 0.0;
        let mut product = 1.0;
        for i in 0..4 {
            kl += q[i] * (q[i].ln() - ctx.log_ref[i]);
            product *= q[i];
        }
        (-(ctx.size as f64) * kl.max(0.0)).exp() * ctx.robbins_norm / product.sqrt()
    } else {
        match lattice_counts(q, ctx.size) {
            Some(counts) => {
                let mut log = ln_gamma(ctx.size as f64 + 1.0);
                for i in 0..4 {
                    if counts[i] > 0 {
                        log += counts[i] as f64 * ctx.log_ref[i]
                            - ln_gamma(counts[i] as f64 + 1.0);
                    }
                }
                log.exp()
            }
            None => 0.0,
        }
    }
}

/// The Robbins approximation of the emission probability, extended to the
/// whole simplex.
///
/// For tables with all cells positive this is
/// `exp(-N KL(q || p)) (2 pi N)^(-3/2) (prod q_ij)^(-1/2)` with `p` the
/// reference distribution; it dominates the true emission probability at
/// every frequency vector. Tables with a zero cell evaluate to the exact
/// emission probability when they lie on the frequency lattice and to 0
/// otherwise.
///
/// Panics if the table is not 2 x 2.
pub fn robbins_integrand(q: &ContingencyTable, ctx: &IntegrandContext) -> f64 {
    assert!(
        q.k() == 2 && q.l() == 2,
        "the integrand is defined for 2 x 2 tables"
    );
    let mut cells = [0.0; 4];
    cells.copy_from_slice(q.cells());
    integrand_cells(&cells, ctx)
}

/// Maps marginal probabilities and a dependence offset to table cells:
/// `[[ab + t, a(1-b) - t], [(1-a)b - t, (1-a)(1-b) + t]]`, row-major.
///
/// The result always sums to 1 but its cells may leave [0, 1]; check with
/// [`coord_valid`] before treating it as a distribution.
pub fn coord_map(p_a: f64, p_b: f64, t: f64) -> [f64; 4] {
    [
        p_a * p_b + t,
        p_a * (1.0 - p_b) - t,
        (1.0 - p_a) * p_b - t,
        (1.0 - p_a) * (1.0 - p_b) + t,
    ]
}

/// Inverts [`coord_map`]: recovers (p_a, p_b, t) from the cells.
pub fn coord_unmap(cells: &[f64; 4]) -> (f64, f64, f64) {
    let p_a = cells[0] + cells[1];
    let p_b = cells[0] + cells[2];
    (p_a, p_b, cells[0] - p_a * p_b)
}

/// Whether cells produced by [`coord_map`] form a valid distribution.
pub fn coord_valid(cells: &[f64; 4]) -> bool {
    cells.iter().all(|&c| (0.0..=1.0).contains(&c))
}

/// The sampling radius `sqrt(-ln(1 - central_probability) / size)`: a
/// Chernoff bound places an empirical marginal within this distance of its
/// mean with probability at least `central_probability`.
pub fn chernoff_radius(central_probability: f64, size: u64) -> Result<f64> {
    if !(central_probability > 0.0 && central_probability < 1.0) {
        return Err(Error::domain(format!(
            "central probability {central_probability} must lie in (0, 1)"
        )));
    }
    if size < 1 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    Ok((-(1.0 - central_probability).ln() / size as f64).sqrt())
}

/// The integrand restricted to the uniform-marginals fiber, as a function
/// of the dependence coordinate; zero-cell endpoints evaluate to 0.
fn fiber_integrand(ctx: &IntegrandContext, path: &TPath, t: f64) -> f64 {
    let cells = path_cells(path, t);
    if cells.iter().all(|&c| c > 0.0) {
        let mut kl = 0.0;
        let mut product = 1.0;
        for i in 0..4 {
            kl += cells[i] * (cells[i].ln() - ctx.log_ref[i]);
            product *= cells[i];
        }
        (-(ctx.size as f64) * kl.max(0.0)).exp() * ctx.robbins_norm / product.sqrt()
    } else {
        0.0
    }
}

/// Builds the importance-sampling plan for a context.
///
/// The marginal scale is the one-sigma Chernoff radius. The dependence
/// Gaussian is centered on the acceptance boundary t_gamma_plus of the
/// uniform-marginals path; its scale is chosen so that the fiber integrand
/// at one standard deviation below the center is a fraction rho = exp(-1/2)
/// of its value at the center. When that ratio is not attainable inside the
/// acceptance interval the scale falls back to the interval's full length.
pub fn t_sampling_scale(ctx: &IntegrandContext) -> Result<SamplingPlan> {
    let path = TPath::uniform();
    let tg_plus = t_gamma_plus(&path, ctx.gamma)?;
    let tg_minus = t_gamma_minus(&path, ctx.gamma)?;
    let interval = tg_plus - tg_minus;
    let f = |t: f64| fiber_integrand(ctx, &path, t);
    let target = rho() * f(tg_plus);
    let t_n = if f(tg_minus) > target {
        tg_minus
    } else {
        // The fiber integrand can be non-monotone for small sizes, so a
        // dense scan locates the crossing closest to the center before
        // bisecting.
        let segments = 1000;
        let mut bracket = (tg_minus, tg_plus);
        for i in (0..segments).rev() {
            let x0 = tg_minus + interval * i as f64 / segments as f64;
            let x1 = tg_minus + interval * (i + 1) as f64 / segments as f64;
            if f(x0) <= target && f(x1) > target {
                bracket = (x0, x1);
                break;
            }
        }
        bisect(|t| f(t) - target, bracket.0, bracket.1, 1e-12, 200)
    };
    let marginal_scale = chernoff_radius(CENTRAL_ONE_SIGMA, ctx.size)?;
    let mut t_scale = tg_plus - t_n;
    // Near the full threshold the integrand's inverse-square-root cell
    // factor diverges at the simplex boundary, collapsing the ratio
    // crossing onto the center; a scale that narrow cannot cover the
    // acceptance interval, so fall back to its full length.
    if !(t_scale > interval * 1e-6) {
        t_scale = interval;
    }
    Ok(SamplingPlan {
        marginal_scale,
        t_center: tg_plus,
        t_scale,
    })
}

/// One standard normal draw via the Box-Muller transform on the uniform
/// generator; one draw consumes exactly two uniforms, keeping streams
/// reproducible.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn standard_normal_density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / std::f64::consts::TAU.sqrt()
}

/// Two-sided standard-normal quantile at the given confidence level.
fn confidence_quantile(confidence: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("unit normal is valid");
    normal.inverse_cdf(1.0 - (1.0 - confidence) / 2.0)
}

fn validate_mc_args(
    max_iterations: u64,
    record_freq: u64,
    stop_check_freq: u64,
    precision_percent: f64,
    confidence: f64,
) -> Result<()> {
    if max_iterations < 1 {
        return Err(Error::domain("max_iterations must be at least 1"));
    }
    if record_freq < 1 || stop_check_freq < 1 {
        return Err(Error::domain("recording frequencies must be at least 1"));
    }
    if !(precision_percent > 0.0) {
        return Err(Error::domain("precision must be positive"));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::domain("confidence must lie in (0, 1)"));
    }
    Ok(())
}

/// Shared sampling loop: averages `ratio` draws, records the scaled running
/// mean every `record_freq` iterations, and stops once the sample variance
/// certifies the requested relative precision.
fn run_sampler<F: FnMut(&mut ChaCha8Rng) -> f64>(
    mut ratio: F,
    scale: f64,
    max_iterations: u64,
    record_freq: u64,
    stop_check_freq: u64,
    precision_percent: f64,
    confidence: f64,
    seed: u64,
) -> McResult {
    let k = (confidence_quantile(confidence) * 100.0 / precision_percent).powi(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut trace = Vec::new();
    let mut stopped = false;
    let mut completed = max_iterations;
    for it in 1..=max_iterations {
        let r = ratio(&mut rng);
        sum += r;
        sum_sq += r * r;
        if it % record_freq == 0 {
            trace.push((it, scale * sum / it as f64));
        }
        if it % stop_check_freq == 0 {
            let mean = sum / it as f64;
            if mean > 0.0 {
                let mean_sq = sum_sq / it as f64;
                if it as f64 >= k * (mean_sq / (mean * mean) - 1.0) {
                    stopped = true;
                    completed = it;
                    break;
                }
            }
        }
    }
    let final_estimate = scale * sum / completed as f64;
    if trace.last().map(|&(i, _)| i) != Some(completed) {
        trace.push((completed, final_estimate));
    }
    McResult {
        iterations: trace,
        final_estimate,
        stopped_by_criterion: stopped,
    }
}

/// Estimates `N^3` times the integral of the extended integrand over the
/// acceptance region by importance sampling.
///
/// Draws (p_A, p_B, t) from the plan's Gaussian product, maps them through
/// [`coord_map`], and averages integrand-to-density ratios; invalid tables
/// and tables above the threshold contribute 0 but count as iterations. The
/// run stops early once the accumulated variance certifies the requested
/// relative precision at the given confidence, and is reproducible for a
/// fixed seed.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_integrate(
    ctx: &IntegrandContext,
    max_iterations: u64,
    record_freq: u64,
    stop_check_freq: u64,
    precision_percent: f64,
    confidence: f64,
    seed: u64,
) -> Result<McResult> {
    validate_mc_args(
        max_iterations,
        record_freq,
        stop_check_freq,
        precision_percent,
        confidence,
    )?;
    let plan = t_sampling_scale(ctx)?;
    let scale = (ctx.size as f64).powi(3);
    let ratio = |rng: &mut ChaCha8Rng| {
        let z1 = standard_normal(rng);
        let z2 = standard_normal(rng);
        let z3 = standard_normal(rng);
        let p_a = 0.5 + plan.marginal_scale * z1;
        let p_b = 0.5 + plan.marginal_scale * z2;
        let t = plan.t_center + plan.t_scale * z3;
        let cells = coord_map(p_a, p_b, t);
        if !coord_valid(&cells) {
            return 0.0;
        }
        if mutual_information_cells(&cells) > ctx.gamma {
            return 0.0;
        }
        let density = standard_normal_density(z1) / plan.marginal_scale
            * (standard_normal_density(z2) / plan.marginal_scale)
            * (standard_normal_density(z3) / plan.t_scale);
        integrand_cells(&cells, ctx) / density
    };
    Ok(run_sampler(
        ratio,
        scale,
        max_iterations,
        record_freq,
        stop_check_freq,
        precision_percent,
        confidence,
        seed,
    ))
}

/// Convenience wrapper: builds the context and returns the final Monte
/// Carlo beta estimate for threshold `gamma` at sample size `size`.
pub fn estimate_beta(
    size: u64,
    eta: f64,
    gamma: f64,
    params: &McParams,
    seed: u64,
) -> Result<f64> {
    let ctx = IntegrandContext::new(size, eta, gamma)?;
    let result = monte_carlo_integrate(
        &ctx,
        params.max_iterations,
        params.record_freq,
        params.stop_check_freq,
        params.precision_percent,
        params.confidence,
        seed,
    )?;
    Ok(result.final_estimate())
}

/// Sums the extended integrand over the whole frequency lattice, keyed by
/// each frequency vector's mutual information.
///
/// Because the integrand dominates the emission probability at every
/// frequency vector, the resulting step function dominates the exact
/// beta-value CDF pointwise.
pub fn robbins_lattice_cdf(size: u64, eta: f64, alphabet: usize) -> Result<StepCdf> {
    if alphabet != 4 {
        return Err(Error::domain(
            "mutual information needs a 2 x 2 arrangement, so the alphabet size must be 4",
        ));
    }
    let ctx = IntegrandContext::new(size, eta, std::f64::consts::LN_2)?;
    let root = TypePrefix::root(size, alphabet)?;
    let mut cdf = StepCdf::new();
    let n = size as f64;
    dfs_process(&root, &mut |t| {
        let c = t.counts();
        let q = [
            c[0] as f64 / n,
            c[1] as f64 / n,
            c[2] as f64 / n,
            c[3] as f64 / n,
        ];
        let tau = mutual_information_cells(&q);
        cdf.account_for_event(integrand_cells(&q, &ctx), tau)
            .expect("integrand values are nonnegative");
    });
    Ok(cdf)
}
