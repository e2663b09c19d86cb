/// Oracle-call accounting for a single solver run.
///
/// `sfo` counts individual component-gradient evaluations (the stochastic
/// first-order oracle complexity); `prox_calls` counts proximal-operator
/// evaluations performed by the solver itself. Metric evaluation never goes
/// through these counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub sfo: u64,
    pub prox_calls: u64,
}

impl Counters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sfo(&mut self, k: u64) {
        self.sfo += k;
    }

    pub fn add_prox(&mut self, k: u64) {
        self.prox_calls += k;
    }
}
