use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use craft_core::io::Config;

#[derive(Debug, Parser)]
#[command(
    name = "craft",
    version,
    about = "Character-region text detection toolkit"
)]
pub struct Cli {
    /// TOML config file; flags given on the command line take precedence.
    #[arg(long, global = true, env = "CRAFT_CONFIG")]
    pub config: Option<PathBuf>,

    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    pub dump_config: bool,

    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Option<Command>,
}

/// Per-key overrides of the config file.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true)]
    pub template_side: Option<usize>,
    #[arg(long, global = true)]
    pub sigma_ratio: Option<f64>,
    #[arg(long, global = true)]
    pub link_width_ratio: Option<f64>,
    #[arg(long, global = true)]
    pub tau_r: Option<f64>,
    #[arg(long, global = true)]
    pub tau_a: Option<f64>,
    #[arg(long, global = true)]
    pub min_component_px: Option<usize>,
    #[arg(long, global = true)]
    pub box_expand_ratio: Option<f64>,
    #[arg(long, global = true)]
    pub outer_extend_ratio: Option<f64>,
    #[arg(long, global = true)]
    pub merge_gap_ratio: Option<f64>,
    #[arg(long, global = true)]
    pub marker_threshold: Option<f32>,
    #[arg(long, global = true)]
    pub region_floor: Option<f32>,
    #[arg(long, global = true)]
    pub crop_height: Option<usize>,
    #[arg(long = "iou", global = true)]
    pub iou_threshold: Option<f64>,
    /// Worker threads (0 = one per CPU).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, c: &mut Config) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(
            template_side,
            sigma_ratio,
            link_width_ratio,
            tau_r,
            tau_a,
            min_component_px,
            box_expand_ratio,
            outer_extend_ratio,
            merge_gap_ratio,
            marker_threshold,
            region_floor,
            crop_height,
            iou_threshold,
            workers
        );
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render region and affinity ground truth from character annotations.
    Labelgen {
        /// Directory of annotation JSON files.
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also render link ground truth from polygon records.
        #[arg(long)]
        link: bool,
    },
    /// Split words into characters using predicted region maps.
    PseudoGt {
        /// Directory of word-level annotation JSON files.
        #[arg(long)]
        annotations: PathBuf,
        /// Directory holding `<stem>_region.csm` predictions.
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn region and affinity maps into word detections.
    Detect {
        /// Directory holding `<stem>_region.csm` and `<stem>_affinity.csm`.
        #[arg(long)]
        maps: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Quad)]
        mode: Mode,
        /// Merge word boxes on one text line.
        #[arg(long)]
        merge_lines: bool,
        /// Read `<stem>_link.csm` instead of the affinity map.
        #[arg(long)]
        link: bool,
        /// Also write a `<stem>.png` overlay per image.
        #[arg(long)]
        overlay: bool,
    },
    /// Score detections against ground truth.
    Eval {
        /// Ground-truth annotation file or directory.
        #[arg(long)]
        gt: PathBuf,
        /// Detection file or directory.
        #[arg(long)]
        det: PathBuf,
        /// Write the JSON summary here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate synthetic scenes with annotations and ground-truth maps.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Curved single-word scenes instead of straight multi-word ones.
        #[arg(long)]
        arc: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Quad,
    Poly,
}
