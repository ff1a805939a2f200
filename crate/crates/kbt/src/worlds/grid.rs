//! Discrete grid world. The agent has a position and one of four headings
//! and observes the 5x5 window of cells around it, rotated into its own
//! frame. Each cell is in one of five states: empty, wall, agent, marker,
//! out-of-bounds.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::input::{ActionId, InputState};

use super::World;

pub const CELL_EMPTY: i64 = 0;
pub const CELL_WALL: i64 = 1;
pub const CELL_AGENT: i64 = 2;
pub const CELL_MARKER: i64 = 3;
pub const CELL_OOB: i64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heading {
    North,
    East,
    South,
    West,
}

impl Heading {
    /// Unit forward vector, with x growing right and y growing down.
    pub fn forward(self) -> (i64, i64) {
        match self {
            Heading::North => (0, -1),
            Heading::East => (1, 0),
            Heading::South => (0, 1),
            Heading::West => (-1, 0),
        }
    }

    /// Unit vector to the agent's left.
    pub fn left(self) -> (i64, i64) {
        match self {
            Heading::North => (-1, 0),
            Heading::East => (0, -1),
            Heading::South => (1, 0),
            Heading::West => (0, 1),
        }
    }

    pub fn turned_left(self) -> Heading {
        match self {
            Heading::North => Heading::West,
            Heading::West => Heading::South,
            Heading::South => Heading::East,
            Heading::East => Heading::North,
        }
    }

    pub fn turned_right(self) -> Heading {
        self.turned_left().turned_left().turned_left()
    }

    pub fn letter(self) -> char {
        match self {
            Heading::North => 'N',
            Heading::East => 'E',
            Heading::South => 'S',
            Heading::West => 'W',
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridWorld {
    pub width: i64,
    pub height: i64,
    pub walls: BTreeSet<(i64, i64)>,
    pub markers: BTreeSet<(i64, i64)>,
    pub agent: (i64, i64),
    pub heading: Heading,
}

impl GridWorld {
    pub fn new(width: i64, height: i64) -> GridWorld {
        GridWorld {
            width,
            height,
            walls: BTreeSet::new(),
            markers: BTreeSet::new(),
            agent: (0, 0),
            heading: Heading::East,
        }
    }

    pub fn add_wall(&mut self, x: i64, y: i64) {
        self.walls.insert((x, y));
    }

    pub fn place_agent(&mut self, x: i64, y: i64, heading: Heading) {
        assert!(!self.walls.contains(&(x, y)), "agent cannot start in a wall");
        self.agent = (x, y);
        self.heading = heading;
    }

    fn cell_state(&self, p: (i64, i64)) -> i64 {
        if p.0 < 0 || p.1 < 0 || p.0 >= self.width || p.1 >= self.height {
            CELL_OOB
        } else if self.walls.contains(&p) {
            CELL_WALL
        } else if p == self.agent {
            CELL_AGENT
        } else if self.markers.contains(&p) {
            CELL_MARKER
        } else {
            CELL_EMPTY
        }
    }

    /// The 25 cells of the agent-frame window, row by row. Row 0 is two
    /// cells ahead, column 0 is two cells to the agent's left; the agent
    /// sits at (2, 2). Variable names are `c{row}{col}`.
    pub fn observation(&self) -> [(String, i64); 25] {
        let f = self.heading.forward();
        let l = self.heading.left();
        core::array::from_fn(|i| {
            let row = (i / 5) as i64;
            let col = (i % 5) as i64;
            let p = (
                self.agent.0 + (2 - row) * f.0 + (2 - col) * l.0,
                self.agent.1 + (2 - row) * f.1 + (2 - col) * l.1,
            );
            (format!("c{row}{col}"), self.cell_state(p))
        })
    }
}

impl World for GridWorld {
    fn observe(&self) -> InputState {
        let mut x = InputState::new();
        for (name, v) in self.observation() {
            x.bind(name, v);
        }
        x
    }

    fn step(&mut self, command: &ActionId) -> Result<()> {
        match command.name() {
            "StepForward" => {
                let f = self.heading.forward();
                let next = (self.agent.0 + f.0, self.agent.1 + f.1);
                // Stepping into a wall or off the grid is a no-op.
                if self.cell_state(next) == CELL_EMPTY || self.cell_state(next) == CELL_MARKER {
                    self.agent = next;
                }
                Ok(())
            }
            "TurnLeft" => {
                self.heading = self.heading.turned_left();
                Ok(())
            }
            "TurnRight" => {
                self.heading = self.heading.turned_right();
                Ok(())
            }
            "Mark" => {
                self.markers.insert(self.agent);
                Ok(())
            }
            "NoOp" => Ok(()),
            other => Err(Error::UnknownCommand(other.to_string())),
        }
    }

    fn commands(&self) -> Vec<ActionId> {
        ["StepForward", "TurnLeft", "TurnRight", "Mark", "NoOp"]
            .iter()
            .map(|s| ActionId::new(*s))
            .collect()
    }

    fn summary(&self) -> String {
        format!(
            "{{pos=({},{}) heading={}}}",
            self.agent.0,
            self.agent.1,
            self.heading.letter()
        )
    }
}
