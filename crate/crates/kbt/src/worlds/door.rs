//! Door world: the true door status is hidden from the robot, whose world
//! view records it as true, false or unknown. Knowledge changes only on an
//! unlock attempt or an explicit observation action.

use crate::error::Result;
use crate::input::{ActionId, InputState};

use super::World;

/// The robot's knowledge of the door status, encoded for conditions as
/// 0 = known locked, 1 = known unlocked, 2 = unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoorKnowledge {
    KnownLocked,
    KnownUnlocked,
    Unknown,
}

impl DoorKnowledge {
    pub fn code(self) -> i64 {
        match self {
            DoorKnowledge::KnownLocked => 0,
            DoorKnowledge::KnownUnlocked => 1,
            DoorKnowledge::Unknown => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DoorWorld {
    pub door_locked: bool,
    pub knowledge: DoorKnowledge,
    pub has_key: bool,
    pub room: i64,
}

impl DoorWorld {
    pub fn new(door_locked: bool, has_key: bool) -> DoorWorld {
        DoorWorld {
            door_locked,
            knowledge: DoorKnowledge::Unknown,
            has_key,
            room: 0,
        }
    }

    fn learn(&mut self) {
        self.knowledge = if self.door_locked {
            DoorKnowledge::KnownLocked
        } else {
            DoorKnowledge::KnownUnlocked
        };
    }
}

impl World for DoorWorld {
    fn observe(&self) -> InputState {
        InputState::of(&[
            ("door_know", self.knowledge.code()),
            ("has_key", self.has_key as i64),
            ("room", self.room),
        ])
    }

    fn step(&mut self, command: &ActionId) -> Result<()> {
        match command.name() {
            "Unlock" => {
                // Attempting the door reveals its status; with the key the
                // attempt also unlocks it.
                if self.has_key && self.door_locked {
                    self.door_locked = false;
                }
                self.learn();
            }
            "GatherInfo" => self.learn(),
            "Enter" => {
                if !self.door_locked {
                    self.room = 1;
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn commands(&self) -> Vec<ActionId> {
        ["Unlock", "GatherInfo", "Enter", "NoOp"]
            .iter()
            .map(|s| ActionId::new(*s))
            .collect()
    }

    fn summary(&self) -> String {
        format!(
            "{{locked={} know={} key={} room={}}}",
            self.door_locked as i64,
            self.knowledge.code(),
            self.has_key as i64,
            self.room
        )
    }
}
