//! Object search driven by the locations mentioned in the dialogue.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::executor::SearchHook;
use crate::planner::{render_triples, Triple};
use crate::reasoner::template::SEARCH_EXAMPLES;
use crate::reasoner::{Parsed, Reasoner, ReasonerRequest, TemplateId};
use crate::subgoal::Subgoal;
use crate::vocab::category_of;

/// Steps expected to reveal `target`. Empty when no location is known, the
/// reasoner fails, or its steps mention objects outside the triples.
pub fn search_for(target: &str, locations: &[Triple], reasoner: &dyn Reasoner) -> Vec<Subgoal> {
    let cat = category_of(target);
    let mentioned = locations
        .iter()
        .any(|t| t.subject == target || category_of(&t.subject) == cat);
    if !mentioned {
        return Vec::new();
    }
    let req = ReasonerRequest::new(TemplateId::Search)
        .with("RETRIEVED_EXAMPLES", SEARCH_EXAMPLES)
        .with("GOAL", format!("Find({target})"))
        .with("OBJECT_LOCATIONS", render_triples(locations));
    let steps = match reasoner.complete(&req) {
        Ok(reply) => match reply.parsed {
            Parsed::Steps { steps } => steps,
            _ => return Vec::new(),
        },
        Err(e) => {
            log::warn!("search for {target} failed: {e}");
            return Vec::new();
        }
    };
    let named: BTreeSet<&str> = locations
        .iter()
        .flat_map(|t| [t.subject.as_str(), t.object.as_str()])
        .chain([target])
        .collect();
    if steps.iter().all(|s| s.args.iter().all(|a| named.contains(a.as_str()))) {
        steps
    } else {
        log::warn!("search for {target} named objects outside the known locations; ignored");
        Vec::new()
    }
}

/// Executor hook backed by a reasoner and the plan's object locations.
pub struct ReasonerSearch {
    reasoner: Arc<dyn Reasoner>,
    locations: Vec<Triple>,
}

impl ReasonerSearch {
    pub fn new(reasoner: Arc<dyn Reasoner>, locations: Vec<Triple>) -> Self {
        ReasonerSearch { reasoner, locations }
    }
}

impl SearchHook for ReasonerSearch {
    fn steps_for(&mut self, target: &str) -> Vec<Subgoal> {
        search_for(target, &self.locations, self.reasoner.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reasoner::scripted::ScriptedReasoner;

    fn t(s: &str, r: &str, o: &str) -> Triple {
        Triple {
            subject: s.into(),
            relation: r.into(),
            object: o.into(),
        }
    }

    fn names(v: Vec<Subgoal>) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fridge_potato() {
        let r = ScriptedReasoner::new();
        let locs = [t("Potato_1", "inside", "Fridge_1")];
        assert_eq!(names(search_for("Potato_1", &locs, &r)), ["Go_to(Fridge_1)", "Open(Fridge_1)"]);
        assert_eq!(names(search_for("Potato", &locs, &r)), ["Go_to(Fridge_1)", "Open(Fridge_1)"]);
    }

    #[test]
    fn cabinet_bread_ignores_spatial_hop() {
        let r = ScriptedReasoner::new();
        let locs = [t("Bread_1", "in", "Cabinet_1"), t("Cabinet_1", "above", "Microwave_1")];
        assert_eq!(names(search_for("Bread_1", &locs, &r)), ["Go_to(Cabinet_1)", "Open(Cabinet_1)"]);
    }

    #[test]
    fn unmentioned_target() {
        let r = ScriptedReasoner::new();
        let locs = [t("Bread_1", "in", "Cabinet_1")];
        assert!(search_for("Egg_1", &locs, &r).is_empty());
        assert!(search_for("Egg_1", &[], &r).is_empty());
    }
}
