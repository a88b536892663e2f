use super::{Cell, HeightBand, ObjectInstance, Pitch, WorldState, Yaw};

/// Euclidean view distance in cells.
pub const VIEW_RANGE: i32 = 6;
/// Manhattan reach for interactive actions, in cells.
pub const INTERACTION_RANGE: i32 = 2;

/// ±45° cone around the heading, limited to `VIEW_RANGE`.
pub(crate) fn in_view_cone(from: Cell, yaw: Yaw, to: Cell) -> bool {
    let (dx, dy) = (to.x - from.x, to.y - from.y);
    if dx == 0 && dy == 0 {
        return true;
    }
    if dx * dx + dy * dy > VIEW_RANGE * VIEW_RANGE {
        return false;
    }
    let (fx, fy) = yaw.delta();
    let forward = dx * fx + dy * fy;
    let lateral = dx * fy - dy * fx;
    forward > 0 && lateral.abs() <= forward
}

/// Nearby objects leave the frame unless the camera is tilted toward their band.
pub(crate) fn band_in_frame(band: HeightBand, pitch: Pitch, close: bool) -> bool {
    let p = pitch.degrees();
    match (band, close) {
        (HeightBand::Counter, true) => (-30..=30).contains(&p),
        (HeightBand::Floor, true) => p <= 0,
        (HeightBand::Upper, true) => p >= 30,
        (HeightBand::Counter, false) => true,
        (HeightBand::Floor, false) => p <= 30,
        (HeightBand::Upper, false) => p >= -30,
    }
}

impl WorldState {
    /// Objects the agent currently perceives, sorted by id.
    pub fn visible_objects(&self) -> Vec<String> {
        self.objects
            .values()
            .filter(|o| self.is_visible(o))
            .map(|o| o.id.clone())
            .collect()
    }

    pub(crate) fn is_visible(&self, obj: &ObjectInstance) -> bool {
        let mut root = obj;
        for anc in self.ancestors(&obj.id) {
            if anc.affordances.openable && !anc.properties.is_open {
                return false;
            }
            root = anc;
        }
        if self.agent.held.as_deref() == Some(root.id.as_str()) {
            return true;
        }
        let close = self.agent.cell.manhattan(obj.cell) <= INTERACTION_RANGE;
        in_view_cone(self.agent.cell, self.agent.yaw, obj.cell)
            && band_in_frame(obj.band, self.agent.pitch, close)
    }

    /// Visible and within reach.
    pub fn can_reach(&self, id: &str) -> bool {
        match self.objects.get(id) {
            Some(o) => {
                self.is_visible(o) && self.agent.cell.manhattan(o.cell) <= INTERACTION_RANGE
            }
            None => false,
        }
    }
}
