//! Desk-scale simulated environments and the layered controller stack.

mod battery;
mod door;
mod grid;
pub mod scenarios;

pub use battery::BatteryWorld;
pub use door::{DoorKnowledge, DoorWorld};
pub use grid::{GridWorld, Heading};

use crate::asm::{Arch, ArchCtx};
use crate::error::{Error, Result};
use crate::input::{ActionId, InputState};

/// A steppable environment: observation produces input states, stepping
/// consumes action ids. Every world accepts `NoOp`, under which only
/// autonomous dynamics advance.
pub trait World {
    fn observe(&self) -> InputState;
    fn step(&mut self, command: &ActionId) -> Result<()>;
    fn commands(&self) -> Vec<ActionId>;
    /// One-line deterministic summary of the post-step state.
    fn summary(&self) -> String;
}

/// Ordered controller layers, each an architecture. A layer's selection
/// either names a concrete world command or names a lower layer, which is
/// then consulted at the same input. The top layer is consulted every step,
/// so it can always interrupt everything beneath it.
#[derive(Debug, Clone)]
pub struct ControllerStack {
    pub layers: Vec<(String, Arch)>,
}

/// Per-run state for a stack: one context per layer. Layers that are not
/// consulted on a step are reset, so lower controllers restart when
/// re-selected.
#[derive(Debug)]
pub struct StackCtx {
    ctxs: Vec<ArchCtx>,
}

impl ControllerStack {
    pub fn new(layers: Vec<(String, Arch)>) -> ControllerStack {
        ControllerStack { layers }
    }

    pub fn single(name: &str, arch: Arch) -> ControllerStack {
        ControllerStack { layers: vec![(name.to_string(), arch)] }
    }

    pub fn new_ctx(&self) -> StackCtx {
        StackCtx { ctxs: self.layers.iter().map(|(_, a)| a.new_ctx()).collect() }
    }

    /// Resolves one step top-down: returns the consulted layer names and the
    /// concrete world command.
    pub fn resolve(&self, ctx: &mut StackCtx, x: &InputState) -> Result<(Vec<String>, ActionId)> {
        let mut path = Vec::new();
        let mut consulted = vec![false; self.layers.len()];
        let mut i = 0usize;
        let command = loop {
            consulted[i] = true;
            path.push(self.layers[i].0.clone());
            let sel = self.layers[i].1.step(&mut ctx.ctxs[i], x)?;
            // A selection naming a lower layer delegates to it.
            match self.layers[i + 1..]
                .iter()
                .position(|(name, _)| name == sel.action.name())
            {
                Some(off) => i = i + 1 + off,
                None => break sel.action,
            }
        };
        for (j, used) in consulted.iter().enumerate() {
            if !used {
                ctx.ctxs[j] = self.layers[j].1.new_ctx();
            }
        }
        Ok((path, command))
    }
}

/// One simulation step record.
#[derive(Debug, Clone)]
pub struct SimStep {
    pub step: usize,
    pub input: InputState,
    pub path: Vec<String>,
    pub command: ActionId,
    pub summary: String,
}

/// A full simulation trace; exports as line-delimited UTF-8 records with a
/// deterministic field order.
#[derive(Debug, Clone, Default)]
pub struct SimTrace {
    pub steps: Vec<SimStep>,
}

impl SimTrace {
    pub fn commands(&self) -> Vec<ActionId> {
        self.steps.iter().map(|s| s.command.clone()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&format!(
                "step={} input={} path={} command={} world={}\n",
                s.step,
                s.input,
                s.path.join(">"),
                s.command,
                s.summary
            ));
        }
        out
    }
}

/// Observe, resolve the controller stack top-down, issue the command, step
/// the world; repeat. Deterministic given the world and controllers (the
/// seed is recorded for stochastic worlds; the built-in worlds are
/// deterministic).
pub fn simulate(
    world: &mut dyn World,
    stack: &ControllerStack,
    steps: usize,
    _seed: Option<u64>,
) -> Result<SimTrace> {
    let accepted = world.commands();
    let mut ctx = stack.new_ctx();
    let mut trace = SimTrace::default();
    for step in 0..steps {
        let input = world.observe();
        let (path, command) = stack.resolve(&mut ctx, &input)?;
        if !accepted.contains(&command) {
            return Err(Error::UnknownCommand(command.name().to_string()));
        }
        world.step(&command)?;
        trace.steps.push(SimStep {
            step,
            input,
            path,
            command,
            summary: world.summary(),
        });
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worlds::scenarios;

    #[test]
    fn battery_drains_and_charges_within_bounds() {
        let mut w = BatteryWorld::new(50).with_rates(3, 7);
        w.step(&ActionId::new("Work")).unwrap();
        assert_eq!(w.battery, 47);
        w.step(&ActionId::new("Recharge")).unwrap();
        assert_eq!(w.battery, 54);
        let mut w = BatteryWorld::new(1).with_rates(10, 5);
        w.step(&ActionId::noop()).unwrap();
        assert_eq!(w.battery, 0, "clamped at empty");
        let mut w = BatteryWorld::new(99).with_rates(1, 5);
        w.step(&ActionId::new("Recharge")).unwrap();
        assert_eq!(w.battery, 100, "clamped at full");
    }

    #[test]
    fn noop_leaves_static_grid_unchanged() {
        let (mut w, _, _) = scenarios::wall_follow_scenario();
        let before = w.observe();
        let pose = (w.agent, w.heading);
        w.step(&ActionId::noop()).unwrap();
        assert_eq!(w.observe(), before);
        assert_eq!((w.agent, w.heading), pose);
    }

    #[test]
    fn door_unlock_reveals_and_unlocks_with_key() {
        let mut w = DoorWorld::new(true, true);
        assert_eq!(w.knowledge, DoorKnowledge::Unknown);
        w.step(&ActionId::new("Unlock")).unwrap();
        assert!(!w.door_locked);
        assert_eq!(w.knowledge, DoorKnowledge::KnownUnlocked);

        let mut w = DoorWorld::new(true, false);
        w.step(&ActionId::new("Unlock")).unwrap();
        assert!(w.door_locked);
        assert_eq!(w.knowledge, DoorKnowledge::KnownLocked);
    }

    #[test]
    fn top_layer_interrupts_lower_layers() {
        // Layered recharge stack on a draining battery: once the battery
        // dips below 10 the top FSM takes over regardless of the work tree.
        let stack = scenarios::recharge_stack_layered();
        let trace = scenarios::simulate_battery(&stack, 40, 12).unwrap();
        let mut seen_recharge = false;
        for s in &trace.steps {
            if s.command.name() == "Recharge" {
                seen_recharge = true;
                // while recharging, only the top layer is consulted
                assert_eq!(s.path, vec!["Top".to_string()]);
            }
        }
        assert!(seen_recharge);
    }

    #[test]
    fn unconsulted_layers_reset() {
        use crate::asm::Arch;
        use crate::cond::ConditionExpr;
        use crate::tree::{action, memory_sequence, KBTree, ReturnRule};
        use crate::input::{InputState, ValueName};
        // Lower layer is a memory sequence; after the top layer bypasses it
        // once, its memory must be gone.
        let leaf = |name: &str, var: &str| {
            action(
                name,
                ReturnRule::running().when(ConditionExpr::eq(var, 1), ValueName::success()),
            )
        };
        let lower = Arch::Tree(
            KBTree::classic(memory_sequence(vec![leaf("A", "a"), leaf("B", "b")]).unwrap())
                .unwrap(),
        );
        let top = Arch::Tr(
            crate::classic::Tr::new(vec![
                (ConditionExpr::eq("panic", 1), ActionId::new("Halt")),
                (ConditionExpr::True, ActionId::new("Lower")),
            ])
            .unwrap(),
        );
        let stack = ControllerStack::new(vec![
            ("Top".to_string(), top),
            ("Lower".to_string(), lower),
        ]);
        let mut ctx = stack.new_ctx();
        let mk = |panic: i64, a: i64, b: i64| {
            InputState::of(&[("panic", panic), ("a", a), ("b", b)])
        };
        let (_, c) = stack.resolve(&mut ctx, &mk(0, 1, 0)).unwrap();
        assert_eq!(c, ActionId::new("B")); // A succeeded, remembered
        let (_, c) = stack.resolve(&mut ctx, &mk(0, 0, 0)).unwrap();
        assert_eq!(c, ActionId::new("B")); // memory holds
        let (path, c) = stack.resolve(&mut ctx, &mk(1, 0, 0)).unwrap();
        assert_eq!(c, ActionId::new("Halt"));
        assert_eq!(path, vec!["Top".to_string()]);
        let (_, c) = stack.resolve(&mut ctx, &mk(0, 0, 0)).unwrap();
        assert_eq!(c, ActionId::new("A")); // memory was reset
    }

    #[test]
    fn sim_trace_text_is_deterministic_and_replayable() {
        let stack = scenarios::recharge_stack_layered();
        let a = scenarios::simulate_battery(&stack, 30, 12).unwrap().to_text();
        let b = scenarios::simulate_battery(&stack, 30, 12).unwrap().to_text();
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 30);
    }

    #[test]
    fn unknown_command_is_an_error() {
        let mut w = BatteryWorld::new(50);
        let stack = ControllerStack::single(
            "Only",
            crate::asm::Arch::Tr(
                crate::classic::Tr::new(vec![(
                    crate::cond::ConditionExpr::True,
                    ActionId::new("Fly"),
                )])
                .unwrap(),
            ),
        );
        assert!(matches!(
            simulate(&mut w, &stack, 3, None),
            Err(Error::UnknownCommand(c)) if c == "Fly"
        ));
    }
}
