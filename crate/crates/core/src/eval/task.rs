use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Activity, Event};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskId {
    Task1a,
    Task1b,
    Task2a,
    Task2b,
}

impl TaskId {
    pub const ALL: [TaskId; 4] = [TaskId::Task1a, TaskId::Task1b, TaskId::Task2a, TaskId::Task2b];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskId::Task1a => "task1a",
            TaskId::Task1b => "task1b",
            TaskId::Task2a => "task2a",
            TaskId::Task2b => "task2b",
        }
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        TaskId::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| format!("unknown task id `{s}`"))
    }
}

/// Which windows a task draws and what counts as positive.
///
/// Task 1 draws only from the still (`none`) blocks that contain the
/// task's event, so its silent windows are that block's pauses. Task 2
/// pools every block of the included activities; the routine activities
/// added in 2b contribute their silent windows only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: TaskId,
    pub positive_event: Event,
    pub included_activities: BTreeSet<Activity>,
    pub silent_only_activities: BTreeSet<Activity>,
    pub block_scoped: bool,
}

impl TaskSpec {
    /// Task variant detecting `positive_event` (grinding or clenching).
    pub fn new(id: TaskId, positive_event: Event) -> Self {
        use Activity::*;
        let base: BTreeSet<Activity> = match id {
            TaskId::Task1a | TaskId::Task1b => [None].into(),
            TaskId::Task2a | TaskId::Task2b => [None, HeadMovement, Music].into(),
        };
        let silent_only: BTreeSet<Activity> = match id {
            TaskId::Task2b => [ChewingBread, ChewingGum, Reading, Drinking, Walking].into(),
            _ => BTreeSet::new(),
        };
        Self {
            id,
            positive_event,
            included_activities: base.union(&silent_only).copied().collect(),
            silent_only_activities: silent_only,
            block_scoped: matches!(id, TaskId::Task1a | TaskId::Task1b),
        }
    }

    /// The task as named: 1a grinding, 1b clenching. Task 2 ids default to
    /// grinding; use [`TaskSpec::new`] for their clenching variant.
    pub fn for_id(id: TaskId) -> Self {
        let event = if id == TaskId::Task1b { Event::Clenching } else { Event::Grinding };
        Self::new(id, event)
    }

    /// The non-silent event that is excluded from this task.
    pub fn other_event(&self) -> Event {
        match self.positive_event {
            Event::Grinding => Event::Clenching,
            _ => Event::Grinding,
        }
    }
}
