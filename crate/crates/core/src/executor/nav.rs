//! Grid path planning.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::world::{ActionKind, Cell, Grid, Yaw};

/// Neighbor expansion order: north, east, south, west.
pub const DIRECTIONS: [(i32, i32); 4] = [(0, 1), (1, 0), (0, -1), (-1, 0)];

fn open(grid: &Grid, extra: &BTreeSet<Cell>, c: Cell) -> bool {
    grid.walkable(c) && !extra.contains(&c)
}

/// Walkable cells sharing an edge with `c`.
pub fn walkable_neighbors(grid: &Grid, c: Cell) -> Vec<Cell> {
    DIRECTIONS
        .iter()
        .map(|(dx, dy)| c.offset(*dx, *dy))
        .filter(|n| grid.walkable(*n))
        .collect()
}

/// Breadth-first shortest path from `start` to the first reachable goal.
/// The returned cells exclude `start`; an empty path means `start` is a goal.
pub fn shortest_path(
    grid: &Grid,
    extra_blocked: &BTreeSet<Cell>,
    start: Cell,
    goals: &BTreeSet<Cell>,
) -> Option<Vec<Cell>> {
    if goals.contains(&start) {
        return Some(Vec::new());
    }
    let mut prev: HashMap<Cell, Cell> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    let mut seen = BTreeSet::from([start]);
    while let Some(cur) = queue.pop_front() {
        for (dx, dy) in DIRECTIONS {
            let n = cur.offset(dx, dy);
            if !open(grid, extra_blocked, n) || !seen.insert(n) {
                continue;
            }
            prev.insert(n, cur);
            if goals.contains(&n) {
                let mut path = vec![n];
                let mut at = n;
                while let Some(p) = prev.get(&at) {
                    if *p == start {
                        break;
                    }
                    path.push(*p);
                    at = *p;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(n);
        }
    }
    None
}

/// Step distances from `start` to every reachable walkable cell.
pub fn distances(grid: &Grid, start: Cell) -> HashMap<Cell, usize> {
    let mut dist = HashMap::from([(start, 0usize)]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        let d = dist[&cur];
        for (dx, dy) in DIRECTIONS {
            let n = cur.offset(dx, dy);
            if grid.walkable(n) && !dist.contains_key(&n) {
                dist.insert(n, d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

/// Path distance from the agent to a cell next to `target`, if reachable.
pub fn approach_distance(dist: &HashMap<Cell, usize>, grid: &Grid, target: Cell) -> Option<usize> {
    walkable_neighbors(grid, target)
        .iter()
        .filter_map(|n| dist.get(n).copied())
        .min()
}

/// Closest walkable cell by Manhattan distance; ties go to the lowest (x, y).
pub fn nearest_walkable(grid: &Grid, c: Cell) -> Option<Cell> {
    if grid.walkable(c) {
        return Some(c);
    }
    let mut best: Option<(i32, Cell)> = None;
    for x in 0..grid.width {
        for y in 0..grid.height {
            let cand = Cell::new(x, y);
            if !grid.walkable(cand) {
                continue;
            }
            let d = cand.manhattan(c);
            let better = match best {
                None => true,
                Some((bd, bc)) => d < bd || (d == bd && (cand.x, cand.y) < (bc.x, bc.y)),
            };
            if better {
                best = Some((d, cand));
            }
        }
    }
    best.map(|(_, c)| c)
}

/// Rotations turning `from` into `to`; a half turn goes right twice.
pub fn rotations(from: Yaw, to: Yaw) -> Vec<ActionKind> {
    if from == to {
        Vec::new()
    } else if from.right() == to {
        vec![ActionKind::RotateRight]
    } else if from.left() == to {
        vec![ActionKind::RotateLeft]
    } else {
        vec![ActionKind::RotateRight, ActionKind::RotateRight]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corridor_path() {
        let g = Grid::open(6, 6);
        let goals = BTreeSet::from([Cell::new(0, 4)]);
        let p = shortest_path(&g, &BTreeSet::new(), Cell::new(0, 0), &goals).unwrap();
        assert_eq!(p, vec![Cell::new(0, 1), Cell::new(0, 2), Cell::new(0, 3), Cell::new(0, 4)]);
    }

    #[test]
    fn north_first_tie_break() {
        let g = Grid::open(4, 4);
        let goals = BTreeSet::from([Cell::new(1, 1)]);
        let p = shortest_path(&g, &BTreeSet::new(), Cell::new(0, 0), &goals).unwrap();
        assert_eq!(p, vec![Cell::new(0, 1), Cell::new(1, 1)]);
    }

    #[test]
    fn walled_off() {
        let mut g = Grid::open(5, 5);
        g.blocked.extend([Cell::new(2, 0), Cell::new(2, 1), Cell::new(2, 2), Cell::new(2, 3), Cell::new(2, 4)]);
        let goals = BTreeSet::from([Cell::new(4, 4)]);
        assert!(shortest_path(&g, &BTreeSet::new(), Cell::new(0, 0), &goals).is_none());
    }

    #[test]
    fn rotation_choice() {
        assert_eq!(rotations(Yaw::NORTH, Yaw::WEST), vec![ActionKind::RotateLeft]);
        assert_eq!(rotations(Yaw::NORTH, Yaw::SOUTH).len(), 2);
        assert!(rotations(Yaw::EAST, Yaw::EAST).is_empty());
    }

    #[test]
    fn nearest_walkable_prefers_low_coordinates() {
        let mut g = Grid::open(5, 5);
        g.blocked.insert(Cell::new(2, 2));
        assert_eq!(nearest_walkable(&g, Cell::new(2, 2)), Some(Cell::new(1, 2)));
    }
}
