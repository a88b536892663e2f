use super::{
    ActionKind, ActionOutcome, Cell, FailureReason, HeightBand, LowLevelAction, ObjectId,
    ObjectInstance, ObjectProperties, WorldState,
};
use crate::vocab;

/// Pieces produced by one `Slice`.
pub const SLICE_PIECES: usize = 3;

type Check = Result<(), FailureReason>;

fn fail_if(cond: bool, reason: FailureReason) -> Check {
    if cond {
        Err(reason)
    } else {
        Ok(())
    }
}

impl WorldState {
    /// Applies one low-level action. Illegal actions fail with a reason and
    /// leave the world untouched.
    pub fn step(&mut self, action: &LowLevelAction) -> ActionOutcome {
        let checked = match action.target() {
            None => self.check_nav(action.kind()),
            Some(t) => self.check_interaction(action.kind(), t),
        };
        match checked {
            Err(reason) => ActionOutcome::Failure(reason),
            Ok(()) => {
                self.apply(action);
                self.settle();
                ActionOutcome::Success
            }
        }
    }

    fn passable(&self, c: Cell) -> bool {
        self.grid.walkable(c) && !(self.agent.held.is_some() && self.grid.narrow.contains(&c))
    }

    fn move_target(&self, kind: ActionKind) -> Cell {
        let (fx, fy) = self.agent.yaw.delta();
        let (dx, dy) = match kind {
            ActionKind::Forward => (fx, fy),
            ActionKind::Backward => (-fx, -fy),
            // left of heading (fx, fy) is (-fy, fx)
            ActionKind::StrafeLeft => (-fy, fx),
            ActionKind::StrafeRight => (fy, -fx),
            _ => (0, 0),
        };
        self.agent.cell.offset(dx, dy)
    }

    fn check_nav(&self, kind: ActionKind) -> Check {
        match kind {
            ActionKind::Forward
            | ActionKind::Backward
            | ActionKind::StrafeLeft
            | ActionKind::StrafeRight => {
                fail_if(!self.passable(self.move_target(kind)), FailureReason::Blocked)
            }
            ActionKind::RotateLeft | ActionKind::RotateRight => Ok(()),
            ActionKind::LookUp => fail_if(self.agent.pitch.up().is_none(), FailureReason::NotApplicable),
            ActionKind::LookDown => {
                fail_if(self.agent.pitch.down().is_none(), FailureReason::NotApplicable)
            }
            _ => Err(FailureReason::NotApplicable),
        }
    }

    fn check_interaction(&self, kind: ActionKind, target: &str) -> Check {
        use FailureReason::*;
        let obj = self.objects.get(target).ok_or(ObjectNotFound)?;
        let a = obj.affordances;
        let p = obj.properties;
        let held = self.held();
        let reach = || fail_if(!self.can_reach(target), NotInRange);
        match kind {
            ActionKind::Pickup => {
                fail_if(!a.pickupable, NotApplicable)?;
                fail_if(held.is_some(), HoldingOtherObject)?;
                reach()
            }
            ActionKind::Place => {
                let h = held.ok_or(HandEmpty)?;
                fail_if(!a.receptacle, NotApplicable)?;
                fail_if(h.id == target || self.is_descendant_of(target, &h.id), NotApplicable)?;
                reach()?;
                fail_if(a.openable && !p.is_open, ReceptacleClosed)?;
                fail_if(obj.children.len() >= obj.capacity, ReceptacleFull)
            }
            ActionKind::Open => {
                fail_if(!a.openable, NotApplicable)?;
                reach()?;
                fail_if(p.is_open, AlreadyOpen)?;
                fail_if(p.is_toggled, ApplianceOn)
            }
            ActionKind::Close => {
                fail_if(!a.openable, NotApplicable)?;
                reach()?;
                fail_if(!p.is_open, NotApplicable)
            }
            ActionKind::ToggleOn | ActionKind::ToggleOff => {
                fail_if(!a.toggleable, NotApplicable)?;
                reach()?;
                let on = kind == ActionKind::ToggleOn;
                fail_if(p.is_toggled == on, NotApplicable)
            }
            ActionKind::Slice => {
                fail_if(!a.sliceable || vocab::sliced_category(&obj.category).is_none(), NotApplicable)?;
                fail_if(!held.is_some_and(|h| vocab::is_knife(&h.category)), NoKnife)?;
                reach()
            }
            ActionKind::Pour => {
                let h = held.ok_or(HandEmpty)?;
                fail_if(h.id == target, NotApplicable)?;
                fail_if(!h.properties.has_liquid(), NotApplicable)?;
                reach()
            }
            _ => Err(NotApplicable),
        }
    }

    fn apply(&mut self, action: &LowLevelAction) {
        let kind = action.kind();
        match kind {
            ActionKind::Forward
            | ActionKind::Backward
            | ActionKind::StrafeLeft
            | ActionKind::StrafeRight => {
                self.agent.cell = self.move_target(kind);
                if let Some(h) = self.agent.held.clone() {
                    self.move_subtree(&h, self.agent.cell, HeightBand::Counter);
                }
            }
            ActionKind::RotateLeft => self.agent.yaw = self.agent.yaw.left(),
            ActionKind::RotateRight => self.agent.yaw = self.agent.yaw.right(),
            ActionKind::LookUp => self.agent.pitch = self.agent.pitch.up().expect("checked"),
            ActionKind::LookDown => self.agent.pitch = self.agent.pitch.down().expect("checked"),
            _ => {
                let target = action.target().expect("interactive").to_string();
                self.apply_interaction(kind, &target);
            }
        }
    }

    fn apply_interaction(&mut self, kind: ActionKind, target: &str) {
        match kind {
            ActionKind::Pickup => {
                self.detach(target);
                self.agent.held = Some(target.to_string());
                let cell = self.agent.cell;
                self.move_subtree(target, cell, HeightBand::Counter);
            }
            ActionKind::Place => {
                let held = self.agent.held.take().expect("checked");
                let (cell, band) = {
                    let r = &self.objects[target];
                    (r.cell, r.band)
                };
                self.objects.get_mut(&held).unwrap().parent = Some(target.to_string());
                self.objects.get_mut(target).unwrap().children.insert(held.clone());
                self.move_subtree(&held, cell, band);
            }
            ActionKind::Open => self.props_mut(target).is_open = true,
            ActionKind::Close => self.props_mut(target).is_open = false,
            ActionKind::ToggleOn => self.props_mut(target).is_toggled = true,
            ActionKind::ToggleOff => self.props_mut(target).is_toggled = false,
            ActionKind::Slice => self.slice(target),
            ActionKind::Pour => {
                let held = self.agent.held.clone().expect("checked");
                let liquid = self.objects[&held].properties;
                {
                    let hp = self.props_mut(&held);
                    hp.is_filled_with_water = false;
                    hp.filled_with_coffee = false;
                }
                let t = &self.objects[target];
                if t.affordances.fillable {
                    let plant = t.category == "HousePlant";
                    let tp = self.props_mut(target);
                    if liquid.filled_with_coffee && !plant {
                        tp.filled_with_coffee = true;
                        tp.is_filled_with_water = false;
                    } else {
                        tp.is_filled_with_water = true;
                        tp.filled_with_coffee = false;
                    }
                }
            }
            _ => unreachable!("navigation handled by caller"),
        }
    }

    fn props_mut(&mut self, id: &str) -> &mut ObjectProperties {
        &mut self.objects.get_mut(id).expect("object exists").properties
    }

    fn detach(&mut self, id: &str) {
        if let Some(p) = self.objects.get_mut(id).and_then(|o| o.parent.take()) {
            if let Some(parent) = self.objects.get_mut(&p) {
                parent.children.remove(id);
            }
        }
    }

    /// Moves `id` and everything nested inside it to `cell`.
    pub(crate) fn move_subtree(&mut self, id: &str, cell: Cell, band: HeightBand) {
        let mut stack = vec![id.to_string()];
        while let Some(cur) = stack.pop() {
            if let Some(o) = self.objects.get_mut(&cur) {
                o.cell = cell;
                o.band = band;
                stack.extend(o.children.iter().cloned());
            }
        }
    }

    fn slice(&mut self, target: &str) {
        let whole = self.objects.remove(target).expect("checked");
        let sliced_cat = vocab::sliced_category(&whole.category).expect("checked");
        let mut next = self
            .objects
            .keys()
            .filter(|k| vocab::category_of(k) == sliced_cat)
            .filter_map(|k| k.rsplit_once('_').and_then(|(_, n)| n.parse::<u32>().ok()))
            .max()
            .unwrap_or(0);
        let mut pieces: Vec<ObjectId> = Vec::with_capacity(SLICE_PIECES);
        for _ in 0..SLICE_PIECES {
            next += 1;
            let id = format!("{sliced_cat}_{next}");
            let properties = ObjectProperties {
                is_cooked: whole.properties.is_cooked,
                is_clean: true,
                ..Default::default()
            };
            self.objects.insert(
                id.clone(),
                ObjectInstance {
                    id: id.clone(),
                    category: sliced_cat.to_string(),
                    cell: whole.cell,
                    band: whole.band,
                    properties,
                    parent: whole.parent.clone(),
                    children: Default::default(),
                    affordances: vocab::default_affordances(sliced_cat),
                    capacity: vocab::default_capacity(sliced_cat),
                },
            );
            pieces.push(id);
        }
        if let Some(p) = &whole.parent {
            let parent = self.objects.get_mut(p).expect("parent exists");
            parent.children.remove(target);
            parent.children.extend(pieces);
            // Slicing may leave a receptacle above its nominal capacity; it
            // simply refuses further placements until emptied.
        }
    }

    fn water_running(&self) -> bool {
        self.objects.values().any(|o| {
            o.properties.is_toggled && (o.category == "Faucet" || vocab::is_water_basin(&o.category))
        })
    }

    /// Propagates state changes caused by running appliances until nothing
    /// changes.
    fn settle(&mut self) {
        loop {
            let before = self.objects.clone();
            let running_water = self.water_running();
            let ids: Vec<ObjectId> = self.objects.keys().cloned().collect();
            for id in &ids {
                let (cat, on, children) = {
                    let o = &self.objects[id];
                    (o.category.clone(), o.properties.is_toggled, o.children.clone())
                };
                if vocab::is_water_basin(&cat) && running_water {
                    for c in &children {
                        let o = self.objects.get_mut(c).unwrap();
                        if o.affordances.dirtyable {
                            o.properties.is_clean = true;
                        }
                        if o.affordances.fillable {
                            o.properties.is_filled_with_water = true;
                            o.properties.filled_with_coffee = false;
                        }
                    }
                }
                if !on {
                    continue;
                }
                match cat.as_str() {
                    "CoffeeMachine" => {
                        for c in &children {
                            let o = self.objects.get_mut(c).unwrap();
                            if matches!(o.category.as_str(), "Mug" | "Cup") && o.properties.is_clean {
                                o.properties.filled_with_coffee = true;
                                o.properties.is_filled_with_water = false;
                            }
                        }
                    }
                    "StoveBurner" => {
                        for vessel in &children {
                            let (vcat, water, inner) = {
                                let v = &self.objects[vessel];
                                (v.category.clone(), v.properties.is_filled_with_water, v.children.clone())
                            };
                            let cooks = water || vcat == "Pan";
                            if cooks {
                                for c in &inner {
                                    let o = self.objects.get_mut(c).unwrap();
                                    if o.affordances.cookable {
                                        o.properties.is_cooked = true;
                                    }
                                }
                            }
                            let v = self.objects.get_mut(vessel).unwrap();
                            if v.affordances.cookable {
                                v.properties.is_cooked = true;
                            }
                        }
                    }
                    "Toaster" => {
                        for c in &children {
                            let o = self.objects.get_mut(c).unwrap();
                            if o.category == "BreadSliced" {
                                o.properties.is_cooked = true;
                            }
                        }
                    }
                    "Microwave" if !self.objects[id].properties.is_open => {
                        let mut inside: Vec<ObjectId> = children.iter().cloned().collect();
                        for c in &children {
                            inside.extend(self.objects[c].children.iter().cloned());
                        }
                        for c in &inside {
                            let o = self.objects.get_mut(c).unwrap();
                            if o.affordances.cookable {
                                o.properties.is_cooked = true;
                            }
                        }
                    }
                    _ => {}
                }
            }
            if self.objects == before {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{WorldSpec, Yaw};
    use serde_json::json;

    /// Agent at (2,2) facing north; counter with a few objects right in front.
    fn kitchen() -> WorldState {
        let spec = json!({
            "schema_version": 1,
            "grid": {"width": 8, "height": 8, "blocked": [[2, 3], [3, 3], [2, 4], [1, 3]]},
            "objects": [
                {"id": "CounterTop_1", "category": "CounterTop", "cell": [2, 3]},
                {"id": "Mug_1", "category": "Mug", "parent": "CounterTop_1", "properties": {"is_clean": false}},
                {"id": "Knife_1", "category": "Knife", "parent": "CounterTop_1"},
                {"id": "Bread_1", "category": "Bread", "parent": "CounterTop_1"},
                {"id": "Fridge_1", "category": "Fridge", "cell": [2, 4], "properties": {"is_open": true}},
                {"id": "Sink_1", "category": "Sink", "cell": [1, 3]},
                {"id": "Faucet_1", "category": "Faucet", "cell": [1, 3]},
                {"id": "CoffeeMachine_1", "category": "CoffeeMachine", "cell": [3, 3]}
            ],
            "agent": {"cell": [2, 2], "yaw": 0}
        });
        WorldState::load(&WorldSpec::from_value(spec).unwrap()).unwrap()
    }

    fn act(kind: ActionKind, t: &str) -> LowLevelAction {
        LowLevelAction::interact(kind, t)
    }

    #[test]
    fn pickup_while_holding_fails() {
        let mut w = kitchen();
        assert!(w.step(&act(ActionKind::Pickup, "Mug_1")).is_success());
        let before = w.clone();
        assert_eq!(
            w.step(&act(ActionKind::Pickup, "Knife_1")),
            ActionOutcome::Failure(FailureReason::HoldingOtherObject)
        );
        assert_eq!(w, before);
    }

    #[test]
    fn place_with_empty_hand_fails() {
        let mut w = kitchen();
        assert_eq!(
            w.step(&act(ActionKind::Place, "CounterTop_1")),
            ActionOutcome::Failure(FailureReason::HandEmpty)
        );
    }

    #[test]
    fn open_twice_fails() {
        let mut w = kitchen();
        assert_eq!(
            w.step(&act(ActionKind::Open, "Fridge_1")),
            ActionOutcome::Failure(FailureReason::AlreadyOpen)
        );
    }

    #[test]
    fn slice_with_knife_replaces_target() {
        let mut w = kitchen();
        assert_eq!(
            w.step(&act(ActionKind::Slice, "Bread_1")),
            ActionOutcome::Failure(FailureReason::NoKnife)
        );
        assert!(w.step(&act(ActionKind::Pickup, "Knife_1")).is_success());
        assert!(w.step(&act(ActionKind::Slice, "Bread_1")).is_success());
        assert!(w.object("Bread_1").is_none());
        for k in 1..=3 {
            let id = format!("BreadSliced_{k}");
            assert_eq!(w.object(&id).unwrap().parent.as_deref(), Some("CounterTop_1"));
        }
        w.check_invariants().unwrap();
    }

    #[test]
    fn sink_cleans_and_fills() {
        let mut w = kitchen();
        w.step(&act(ActionKind::Pickup, "Mug_1"));
        assert!(w.step(&act(ActionKind::Place, "Sink_1")).is_success());
        assert!(w.step(&act(ActionKind::ToggleOn, "Faucet_1")).is_success());
        let m = w.object("Mug_1").unwrap().properties;
        assert!(m.is_clean && m.is_filled_with_water);
    }

    #[test]
    fn coffee_needs_clean_mug() {
        let mut w = kitchen();
        w.step(&act(ActionKind::Pickup, "Mug_1"));
        assert!(w.step(&act(ActionKind::Place, "CoffeeMachine_1")).is_success());
        w.step(&act(ActionKind::ToggleOn, "CoffeeMachine_1"));
        assert!(!w.object("Mug_1").unwrap().properties.filled_with_coffee);

        let mut w = kitchen();
        w.objects.get_mut("Mug_1").unwrap().properties.is_clean = true;
        w.step(&act(ActionKind::Pickup, "Mug_1"));
        w.step(&act(ActionKind::Place, "CoffeeMachine_1"));
        w.step(&act(ActionKind::ToggleOn, "CoffeeMachine_1"));
        let m = w.object("Mug_1").unwrap().properties;
        assert!(m.filled_with_coffee && !m.is_filled_with_water);
    }

    #[test]
    fn receptacle_full() {
        let mut w = kitchen();
        w.step(&act(ActionKind::Pickup, "Knife_1"));
        w.step(&act(ActionKind::Place, "CoffeeMachine_1"));
        w.step(&act(ActionKind::Pickup, "Mug_1"));
        assert_eq!(
            w.step(&act(ActionKind::Place, "CoffeeMachine_1")),
            ActionOutcome::Failure(FailureReason::ReceptacleFull)
        );
    }

    #[test]
    fn forward_into_furniture_blocked() {
        let mut w = kitchen();
        assert_eq!(
            w.step(&LowLevelAction::nav(ActionKind::Forward)),
            ActionOutcome::Failure(FailureReason::Blocked)
        );
        w.step(&LowLevelAction::nav(ActionKind::RotateRight));
        assert_eq!(w.agent.yaw, Yaw::EAST);
        assert!(w.step(&LowLevelAction::nav(ActionKind::Forward)).is_success());
        assert_eq!(w.agent.cell, Cell::new(3, 2));
    }

    #[test]
    fn out_of_reach_interaction_fails() {
        let mut w = kitchen();
        w.step(&LowLevelAction::nav(ActionKind::RotateRight));
        w.step(&LowLevelAction::nav(ActionKind::RotateRight));
        assert_eq!(
            w.step(&act(ActionKind::Pickup, "Mug_1")),
            ActionOutcome::Failure(FailureReason::NotInRange)
        );
    }
}
