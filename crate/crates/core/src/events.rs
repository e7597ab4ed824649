//! Path events: predicates over a complete walk (and its induced coloring)
//! used for event-conditioned inference.
//!
//! A *turn* at time t means the walk reverses direction there:
//! X_t and X_{t+1} are both nonzero and opposite. The pivot-based events
//! refer to a list of candidate turn times supplied by the caller (for the
//! structured probe records these are the isolated-W times).

use crate::record::InducedColoring;
use std::fmt;
use std::sync::Arc;

type CustomTest = Arc<dyn Fn(&[i64], &InducedColoring) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum PathEvent {
    /// Turns at pivots 0..=index and at no later pivot ("last turn at").
    LastTurnAt { pivots: Vec<usize>, index: usize },
    /// No turn at any pivot.
    NoTurn { pivots: Vec<usize> },
    /// Turn at some pivot.
    AtLeastOneTurn { pivots: Vec<usize> },
    /// Final increment is +1.
    EndsUp,
    /// Final increment is −1.
    EndsDown,
    /// S_time = position.
    PositionAt { time: usize, position: i64 },
    /// `time` is a cut time: the supports of S_0..S_time and of
    /// S_{time+1}..S_n are disjoint and S_time ≥ 0.
    CutAt { time: usize },
    /// `time` is an upward cut: S_time ≥ 0, the past stays at or below
    /// S_time and the future strictly above it. Conditioning on this event
    /// makes the record after `time` carry no information about the walk
    /// and record up to `time` (the compatible-future sum factors out
    /// independently of the past's shape, which two-sided cuts do not
    /// guarantee).
    UpwardCutAt { time: usize },
    /// Conjunction.
    All(Vec<PathEvent>),
    /// Arbitrary predicate over (positions, induced coloring).
    Custom { name: String, test: CustomTest },
}

/// True when the walk reverses direction at time t (1-based step index).
pub fn is_turn_at(positions: &[i64], t: usize) -> bool {
    if t == 0 || t + 1 >= positions.len() {
        return false;
    }
    let before = positions[t] - positions[t - 1];
    let after = positions[t + 1] - positions[t];
    before != 0 && after == -before
}

fn cut_at(positions: &[i64], k: usize) -> bool {
    let n = positions.len() - 1;
    if k >= n || positions[k] < 0 {
        return false;
    }
    let (past, future) = positions.split_at(k + 1);
    let past_min = *past.iter().min().expect("nonempty");
    let past_max = *past.iter().max().expect("nonempty");
    let fut_min = *future.iter().min().expect("nonempty");
    let fut_max = *future.iter().max().expect("nonempty");
    past_max < fut_min || fut_max < past_min
}

fn upward_cut_at(positions: &[i64], k: usize) -> bool {
    let n = positions.len() - 1;
    if k >= n || positions[k] < 0 {
        return false;
    }
    let level = positions[k];
    let (past, future) = positions.split_at(k + 1);
    past.iter().all(|&s| s <= level) && future.iter().all(|&s| s > level)
}

impl PathEvent {
    pub fn all(events: Vec<PathEvent>) -> PathEvent {
        PathEvent::All(events)
    }

    pub fn custom<F>(name: impl Into<String>, test: F) -> PathEvent
    where
        F: Fn(&[i64], &InducedColoring) -> bool + Send + Sync + 'static,
    {
        PathEvent::Custom {
            name: name.into(),
            test: Arc::new(test),
        }
    }

    /// Evaluate on a complete path. `positions` holds S_0..S_n; `coloring`
    /// is the coloring induced on the sites visited at times ≥ 1.
    pub fn holds(&self, positions: &[i64], coloring: &InducedColoring) -> bool {
        match self {
            PathEvent::LastTurnAt { pivots, index } => pivots
                .iter()
                .enumerate()
                .all(|(l, &t)| is_turn_at(positions, t) == (l <= *index)),
            PathEvent::NoTurn { pivots } => {
                pivots.iter().all(|&t| !is_turn_at(positions, t))
            }
            PathEvent::AtLeastOneTurn { pivots } => {
                pivots.iter().any(|&t| is_turn_at(positions, t))
            }
            PathEvent::EndsUp => {
                let n = positions.len() - 1;
                n >= 1 && positions[n] - positions[n - 1] == 1
            }
            PathEvent::EndsDown => {
                let n = positions.len() - 1;
                n >= 1 && positions[n] - positions[n - 1] == -1
            }
            PathEvent::PositionAt { time, position } => {
                positions.get(*time) == Some(position)
            }
            PathEvent::CutAt { time } => cut_at(positions, *time),
            PathEvent::UpwardCutAt { time } => upward_cut_at(positions, *time),
            PathEvent::All(events) => events.iter().all(|e| e.holds(positions, coloring)),
            PathEvent::Custom { test, .. } => test(positions, coloring),
        }
    }

    pub fn name(&self) -> String {
        match self {
            PathEvent::LastTurnAt { index, .. } => format!("LT_{index}"),
            PathEvent::NoTurn { .. } => "NT".to_string(),
            PathEvent::AtLeastOneTurn { .. } => "AOT".to_string(),
            PathEvent::EndsUp => "EU".to_string(),
            PathEvent::EndsDown => "ED".to_string(),
            PathEvent::PositionAt { time, position } => format!("S{time}={position}"),
            PathEvent::CutAt { time } => format!("CUT{time}"),
            PathEvent::UpwardCutAt { time } => format!("UCUT{time}"),
            PathEvent::All(events) => {
                let parts: Vec<String> = events.iter().map(|e| e.name()).collect();
                parts.join("&")
            }
            PathEvent::Custom { name, .. } => name.clone(),
        }
    }
}

impl fmt::Debug for PathEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PathEvent({})", self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty_coloring() -> InducedColoring {
        InducedColoring::new(0, Vec::new())
    }

    #[test]
    fn turn_detection() {
        // zigzag: up, down, up
        let pos = [0i64, 1, 0, 1];
        assert!(is_turn_at(&pos, 1));
        assert!(is_turn_at(&pos, 2));
        assert!(!is_turn_at(&pos, 0));
        assert!(!is_turn_at(&pos, 3));
        // pauses are not turns
        let pos = [0i64, 0, 1];
        assert!(!is_turn_at(&pos, 1));
    }

    #[test]
    fn end_direction() {
        let c = empty_coloring();
        assert!(PathEvent::EndsUp.holds(&[0, 1, 2], &c));
        assert!(PathEvent::EndsDown.holds(&[0, 1, 0], &c));
        assert!(!PathEvent::EndsUp.holds(&[0, 1, 0], &c));
    }

    #[test]
    fn last_turn_requires_exact_prefix() {
        let pivots = vec![1, 3];
        // turns at 1 and 3
        let pos = [0i64, 1, 0, -1, 0];
        let c = empty_coloring();
        assert!(PathEvent::LastTurnAt {
            pivots: pivots.clone(),
            index: 1
        }
        .holds(&pos, &c));
        assert!(!PathEvent::LastTurnAt {
            pivots: pivots.clone(),
            index: 0
        }
        .holds(&pos, &c));
        assert!(!PathEvent::NoTurn { pivots: pivots.clone() }.holds(&pos, &c));
        assert!(PathEvent::AtLeastOneTurn { pivots }.holds(&pos, &c));
    }

    #[test]
    fn cut_event_matches_definition() {
        let c = empty_coloring();
        assert!(PathEvent::CutAt { time: 0 }.holds(&[0, 1, 2], &c));
        assert!(!PathEvent::CutAt { time: 0 }.holds(&[0, 1, 0], &c));
        // position below the origin fails the sign clause
        assert!(!PathEvent::CutAt { time: 1 }.holds(&[0, -1, -2], &c));
        assert!(PathEvent::CutAt { time: 0 }.holds(&[0, -1, -2], &c));
    }
}
