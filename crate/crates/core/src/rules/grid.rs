use crate::model::WeightMode;

use super::{DynamicParam, RuleError, RuleSpec, StaticKernel};

/// Cartesian rule grid: every kernel, optionally static, then every harsh
/// `(param, t)` and every smooth `(param, α)` combination.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub kernels: Vec<StaticKernel>,
    pub include_static: bool,
    pub harsh_params: Vec<DynamicParam>,
    pub harsh_cutoffs: Vec<u64>,
    pub smooth_params: Vec<DynamicParam>,
    pub smooth_alphas: Vec<f64>,
    pub threshold: f64,
    pub weight_mode: WeightMode,
}

const CUTOFFS: [u64; 4] = [0, 50, 100, 150];
const ALPHAS: [f64; 4] = [0.1, 0.3, 0.5, 1.0];

impl GridSpec {
    /// The 54-rule experimental grid: 6 kernels × (static, 4 harsh cutoffs on
    /// the event count, 4 smoothing rates on the paragraph count).
    pub fn standard() -> Self {
        GridSpec {
            kernels: StaticKernel::grid_kernels(),
            include_static: true,
            harsh_params: vec![DynamicParam::NumEvents],
            harsh_cutoffs: CUTOFFS.to_vec(),
            smooth_params: vec![DynamicParam::NumParagraphs],
            smooth_alphas: ALPHAS.to_vec(),
            threshold: 0.5,
            weight_mode: WeightMode::default(),
        }
    }

    /// Both dynamizers over both log parameters: 102 rules.
    pub fn full() -> Self {
        let both = vec![DynamicParam::NumEvents, DynamicParam::NumParagraphs];
        GridSpec {
            harsh_params: both.clone(),
            smooth_params: both,
            ..Self::standard()
        }
    }

    pub fn static_only() -> Self {
        GridSpec {
            harsh_params: vec![],
            smooth_params: vec![],
            ..Self::standard()
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::standard()
    }
}

pub fn build_rule_grid(spec: &GridSpec) -> Result<Vec<RuleSpec>, RuleError> {
    let mut out = Vec::new();
    for &kernel in &spec.kernels {
        let base = RuleSpec::new(kernel, spec.threshold).with_mode(spec.weight_mode);
        if spec.include_static {
            out.push(base);
        }
        for &param in &spec.harsh_params {
            for &t in &spec.harsh_cutoffs {
                out.push(base.harsh(param, t));
            }
        }
        for &param in &spec.smooth_params {
            for &alpha in &spec.smooth_alphas {
                out.push(base.smooth(param, alpha));
            }
        }
    }
    if out.is_empty() {
        return Err(RuleError::Config("rule grid is empty".into()));
    }
    for r in &out {
        r.validate()?;
    }
    Ok(out)
}
