use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "semitoeplitz",
    version,
    about = "Diagnostics for semibounded Toeplitz and Hankel quadratic forms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Quadrature grid size (power of two).
    #[arg(long, env = "SEMITOEPLITZ_GRID", default_value_t = semitoeplitz::DEFAULT_GRID, global = true)]
    pub grid: usize,

    /// Include the parsed measure in the report.
    #[arg(long, global = true)]
    pub echo_measure: bool,
}

/// A measure given as a file path or as inline JSON.
#[derive(Debug, Args)]
pub struct MeasureArg {
    /// Measure JSON: a file path, or the document itself if it starts with `{`.
    #[arg(long, short)]
    pub measure: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Toeplitz entries t_0 … t_N.
    Coeffs {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        n_max: usize,
    },
    /// t[g,g] by the direct double sum.
    Form {
        #[command(flatten)]
        measure: MeasureArg,
        /// Coefficients g_0, g_1, …: JSON array of numbers or [re, im] pairs, or a file holding one.
        #[arg(long)]
        g: String,
    },
    /// (T g)_n for 0 ≤ n < out_len.
    Apply {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        g: String,
        #[arg(long)]
        out_len: usize,
    },
    /// Smallest eigenvalue of T_N over a sweep of N.
    Spectrum {
        #[command(flatten)]
        measure: MeasureArg,
        /// Comma-separated section orders; defaults to 1, 2, 4, … up to --n-max.
        #[arg(long, value_delimiter = ',')]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 256)]
        n_max: usize,
    },
    /// Cholesky PSD check of T_N, with a certificate on failure.
    Psd {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        order: usize,
        /// Pivots below -rel_tol·max_diag·N count as negative.
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
    },
    /// Closability of the form generated by the measure.
    Classify {
        #[command(flatten)]
        measure: MeasureArg,
    },
    /// Coefficient-decay closability diagnostic.
    Decay {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        n_max: usize,
        /// Defaults to n_max / 8.
        #[arg(long)]
        tail_start: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        nondecay_fraction: f64,
        #[arg(long, default_value_t = 1e-6)]
        l2_tail_share: f64,
        #[arg(long, default_value_t = 1e-12)]
        noise_floor: f64,
    },
    /// Witness sequence g^(k) for the heaviest atom.
    Witness {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
    },
    /// u_n = ∫ u z^{-n} dM from grid samples of u.
    Adjoint {
        #[command(flatten)]
        measure: MeasureArg,
        /// Samples of u on a uniform grid, in the format of --g.
        #[arg(long)]
        u: String,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-4)]
        tail_ratio: f64,
    },
    /// Closed form ∫|𝒜g|² w dm along r = 1 - 2^{-j} and at r = 1.
    Closure {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 12)]
        rungs: usize,
    },
    /// ∫|Σ g_n z^n|² w dm for a two-sided finite sequence.
    Laurent {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        g: String,
        /// Index of the first entry of --g.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        offset: i64,
    },
    /// Dyadic-arc A₂ estimates of the weight.
    Muckenhoupt {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        #[arg(long, default_value_t = 0.05)]
        bounded_rel_change: f64,
        #[arg(long, default_value_t = 1.2)]
        diverging_ratio: f64,
        #[arg(long, default_value_t = 3)]
        diverging_run: usize,
    },
    /// Weighted norm ratios ‖P₊f‖/‖f‖ over a probe family.
    Project {
        #[command(flatten)]
        measure: MeasureArg,
        /// Random trigonometric probes in addition to the Gaussian bumps.
        #[arg(long, default_value_t = 32)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Power moments q_0 … q_N of a measure on ℝ.
    HankelMoments {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        n_max: usize,
        /// Also run the PSD check on H_order.
        #[arg(long)]
        psd_order: Option<usize>,
    },
    /// q[g,g] = Σ q_{n+m} g_m ḡ_n.
    HankelForm {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        g: String,
    },
    /// Closability of the Hankel form of a measure on ℝ.
    HankelClassify {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long, default_value_t = semitoeplitz::hankel::DIAGNOSTIC_ORDER)]
        n_max: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coeffs { .. } => "coeffs",
            Command::Form { .. } => "form",
            Command::Apply { .. } => "apply",
            Command::Spectrum { .. } => "spectrum",
            Command::Psd { .. } => "psd",
            Command::Classify { .. } => "classify",
            Command::Decay { .. } => "decay",
            Command::Witness { .. } => "witness",
            Command::Adjoint { .. } => "adjoint",
            Command::Closure { .. } => "closure",
            Command::Laurent { .. } => "laurent",
            Command::Muckenhoupt { .. } => "muckenhoupt",
            Command::Project { .. } => "project",
            Command::HankelMoments { .. } => "hankel-moments",
            Command::HankelForm { .. } => "hankel-form",
            Command::HankelClassify { .. } => "hankel-classify",
        }
    }
}
