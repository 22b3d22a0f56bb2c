use crate::model::{EventLog, Instance};

/// Greedily minimizes a failing instance.
///
/// Repeatedly drops single events (skipping removals that would break the
/// proposal rule) and idle agents, keeping any candidate on which `fails`
/// still holds. The result is 1-minimal with respect to event removal.
pub fn shrink_instance(instance: &Instance, fails: &dyn Fn(&Instance) -> bool) -> Instance {
    let mut best = instance.clone();
    loop {
        let mut progressed = false;

        let mut k = best.log().len();
        while k > 0 {
            k -= 1;
            let votes = best
                .log()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, e)| (e.agent, e.paragraph, e.value));
            let Ok(log) = EventLog::from_votes(votes) else {
                continue;
            };
            let candidate = best.with_log(log).expect("subset of agents");
            if fails(&candidate) {
                best = candidate;
                progressed = true;
            }
        }

        let used = best.log().agents();
        if used.len() < best.n_agents() {
            let candidate = Instance::new(used, best.log().clone()).expect("log agents");
            if fails(&candidate) {
                best = candidate;
                progressed = true;
            }
        }

        if !progressed {
            return best;
        }
    }
}
