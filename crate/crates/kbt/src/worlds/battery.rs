//! Battery world: an integer battery percentage that drains while the robot
//! is tasked and charges while `Recharge` is selected. Optionally maintains
//! the hidden `recharging` blackboard flag, which models implicit memory.

use crate::error::Result;
use crate::input::{ActionId, InputState};

use super::World;

#[derive(Debug, Clone)]
pub struct BatteryWorld {
    pub battery: i64,
    pub drain: i64,
    pub charge: i64,
    /// When set, `observe` also emits a hidden `recharging` variable that
    /// turns on when `Recharge` is issued and off once the battery is full.
    pub track_recharging: bool,
    recharging: i64,
}

impl BatteryWorld {
    pub fn new(initial: i64) -> BatteryWorld {
        BatteryWorld {
            battery: initial.clamp(0, 100),
            drain: 1,
            charge: 5,
            track_recharging: false,
            recharging: 0,
        }
    }

    pub fn with_rates(mut self, drain: i64, charge: i64) -> Self {
        self.drain = drain;
        self.charge = charge;
        self
    }

    pub fn tracking_recharging(mut self) -> Self {
        self.track_recharging = true;
        self
    }
}

impl World for BatteryWorld {
    fn observe(&self) -> InputState {
        let mut x = InputState::of(&[("battery", self.battery)]);
        if self.track_recharging {
            x.bind_hidden("recharging", self.recharging);
        }
        x
    }

    fn step(&mut self, command: &ActionId) -> Result<()> {
        if command.name() == "Recharge" {
            self.battery = (self.battery + self.charge).clamp(0, 100);
            self.recharging = 1;
        } else {
            // Any task, including NoOp, lets the battery drain.
            self.battery = (self.battery - self.drain).clamp(0, 100);
        }
        if self.battery >= 100 {
            self.recharging = 0;
        }
        Ok(())
    }

    fn commands(&self) -> Vec<ActionId> {
        vec![
            ActionId::new("Recharge"),
            ActionId::new("Work"),
            ActionId::noop(),
        ]
    }

    fn summary(&self) -> String {
        format!("{{battery={}}}", self.battery)
    }
}
