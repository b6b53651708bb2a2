//! Per-cell arbitration of DO and PLACE actions.

use super::action::ActionKind;
use crate::rng::Rng;
use crate::types::{AgentId, Pos};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Intent {
    pub agent: AgentId,
    /// The faced cell the action acts on.
    pub target: Pos,
    pub action: ActionKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Resolution {
    /// `(cell, winning agent)` for every targeted cell, row-major order.
    pub winners: Vec<(Pos, AgentId)>,
    /// Agents whose action is dropped this step, ascending.
    pub losers: Vec<AgentId>,
}

/// Picks one uniformly random winner for every cell targeted by two or more
/// intents. The draw for a cell comes from `rng.substream(cell_key)`, so it
/// does not depend on which other cells were contested.
pub fn resolve_cell_conflicts(intents: &[Intent], rng: &Rng, map_width: u16) -> Resolution {
    let mut cells: Vec<Pos> = intents.iter().map(|i| i.target).collect();
    cells.sort_unstable();
    cells.dedup();

    let mut res = Resolution::default();
    let mut contenders: Vec<AgentId> = Vec::with_capacity(intents.len());
    for cell in cells {
        contenders.clear();
        contenders.extend(intents.iter().filter(|i| i.target == cell).map(|i| i.agent));
        contenders.sort_unstable();
        let winner = if contenders.len() == 1 {
            contenders[0]
        } else {
            let key = cell_key(cell, map_width);
            let pick = rng.substream(key).below(contenders.len() as u64) as usize;
            contenders[pick]
        };
        res.winners.push((cell, winner));
        res.losers.extend(contenders.iter().copied().filter(|&a| a != winner));
    }
    res.losers.sort_unstable();
    res
}

/// Out-of-map cells can be targeted too, so the key must stay injective for
/// negative coordinates.
fn cell_key(cell: Pos, map_width: u16) -> u64 {
    let w = map_width as i64 + 2;
    ((cell.row as i64 + 1) * w + (cell.col as i64 + 1)) as u64
}
