//! The experiment registry.

mod axb;
mod diagram;
mod gamma;
mod gauss;
mod wiener;

use anyhow::{anyhow, bail};
use serde::de::DeserializeOwned;

use crate::config::ExperimentConfig;
use crate::report::{CheckRow, Environment, Report};

/// Per-run switches shared by all experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunContext {
    pub seed: u64,
    pub sensitivity: bool,
}

type Body = Box<dyn Fn(&RunContext) -> anyhow::Result<Vec<CheckRow>> + Send + Sync>;

/// A validated experiment, ready to run.
pub struct Plan {
    pub cutoff: Option<usize>,
    body: Body,
}

impl Plan {
    fn new(cutoff: Option<usize>, body: impl Fn(&RunContext) -> anyhow::Result<Vec<CheckRow>> + Send + Sync + 'static) -> Self {
        Self { cutoff, body: Box::new(body) }
    }
}

pub struct Experiment {
    pub id: &'static str,
    pub module: &'static str,
    pub description: &'static str,
    pub default_config: &'static str,
    prepare: fn(&ExperimentConfig) -> anyhow::Result<Plan>,
}

impl Experiment {
    pub fn default_config(&self) -> ExperimentConfig {
        ExperimentConfig::parse(self.default_config).expect("bundled configuration parses")
    }

    /// Parses and validates the parameters without computing anything.
    pub fn prepare(&self, config: &ExperimentConfig) -> anyhow::Result<Plan> {
        if config.id != self.id {
            bail!("configuration is for `{}`, not `{}`", config.id, self.id);
        }
        (self.prepare)(config)
    }

    pub fn execute(&self, plan: &Plan, ctx: RunContext) -> anyhow::Result<Report> {
        let rows = (plan.body)(&ctx)?;
        Ok(Report {
            experiment: self.id.into(),
            description: self.description.into(),
            environment: Environment {
                seed: ctx.seed,
                cutoff: plan.cutoff,
                version: env!("CARGO_PKG_VERSION").into(),
                sensitivity: ctx.sensitivity,
            },
            rows,
        })
    }

    /// `prepare` followed by `execute`, with the seed taken from the configuration.
    pub fn run(&self, config: &ExperimentConfig, sensitivity: bool) -> anyhow::Result<Report> {
        let plan = self.prepare(config)?;
        self.execute(&plan, RunContext { seed: config.seed, sensitivity })
    }

    /// A filter selects experiments whose id or module starts with it.
    pub fn matches(&self, filter: &str) -> bool {
        self.id.starts_with(filter) || self.module.starts_with(filter)
    }
}

macro_rules! experiment {
    ($id:literal, $module:literal, $description:literal, $prepare:path) => {
        Experiment {
            id: $id,
            module: $module,
            description: $description,
            default_config: include_str!(concat!("../../configs/", $id, ".toml")),
            prepare: $prepare,
        }
    };
}

pub static REGISTRY: &[Experiment] = &[
    experiment!("wiener.girsanov", "wiener", "Cameron-Martin translation weight has unit mean under bridge measure", wiener::girsanov),
    experiment!(
        "axb.unitarity",
        "axb_group",
        "Loop ax+b representation preserves inner products of exponential functionals",
        axb::unitarity
    ),
    experiment!(
        "axb.cocycle",
        "axb_group",
        "Extended-group 2-cocycle identity and central Lie brackets of dilation generators",
        axb::cocycle
    ),
    experiment!("axb.gamma_kernel", "axb_group", "Gamma-kernel operator against the conjugated finite representation", axb::gamma_kernel),
    experiment!("gamma.regularized", "gamma_suite", "Regularized Gamma functional equation and its large-t limit", gamma::regularized),
    experiment!(
        "gamma.functional_eq",
        "gamma_suite",
        "Loop Gamma functional equation by Gaussian integration by parts on bridges",
        gamma::functional_eq
    ),
    experiment!("gauss.correlators", "gauss_field", "Closed-form exponential correlators against field sampling", gauss::correlators),
    experiment!(
        "diagram.structure",
        "diagram_engine",
        "Every component of every contraction diagram carries at most one loop",
        diagram::structure
    ),
    experiment!("diagram.equivalence", "diagram_engine", "Diagram sums equal direct normal ordering, exactly", diagram::equivalence),
    experiment!("diagram.commutators", "diagram_engine", "Affine sl(2,R) relations between renormalized correlators", diagram::commutators),
    experiment!("diagram.hermiticity", "diagram_engine", "Conjugate-reversal symmetry of renormalized correlators", diagram::hermiticity),
];

pub fn list(filter: &str) -> impl Iterator<Item = &'static Experiment> + '_ {
    REGISTRY.iter().filter(move |e| e.matches(filter))
}

pub fn find(id: &str) -> anyhow::Result<&'static Experiment> {
    REGISTRY.iter().find(|e| e.id == id).ok_or_else(|| anyhow!("unknown experiment `{id}`"))
}

/// Typed parameters of one configuration.
fn params<P: DeserializeOwned>(config: &ExperimentConfig) -> anyhow::Result<P> {
    config.params()
}

/// Seed of the `index`-th independent estimate within a run.
fn subseed(ctx: &RunContext, index: usize) -> u64 {
    ctx.seed.wrapping_add(index as u64)
}
