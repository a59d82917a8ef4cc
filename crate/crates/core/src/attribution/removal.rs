use crate::error::AttributionError;
use crate::qbaf::{ArgumentId, Edge, Qbaf};
use crate::semantics::SolverConfig;

use super::game::{Coalition, Game};
use super::{AttributionTarget, Kind};

/// Topic strength in `q` minus topic strength once `beta` is removed.
pub fn removal_aae(
    q: &Qbaf,
    cfg: &SolverConfig,
    topic: &ArgumentId,
    beta: &ArgumentId,
) -> Result<f64, AttributionError> {
    let game = Game::new(q, cfg, topic, Kind::Arguments)?;
    let p = game.position(&AttributionTarget::Argument(beta.clone()))?;
    removal(&game, p)
}

/// Topic strength in `q` minus topic strength once edge `r` is removed.
pub fn removal_rae(
    q: &Qbaf,
    cfg: &SolverConfig,
    topic: &ArgumentId,
    r: &Edge,
) -> Result<f64, AttributionError> {
    let game = Game::new(q, cfg, topic, Kind::Relations)?;
    let p = game.position(&AttributionTarget::Edge(r.clone()))?;
    removal(&game, p)
}

pub(crate) fn removal(game: &Game, player: usize) -> Result<f64, AttributionError> {
    let full = Coalition::full(game.num_players());
    let mut without = full.clone();
    without.remove(player);
    let with_all = game.value(&full).map_err(|e| label(e, "full framework"))?;
    let reduced = game
        .evaluate(&without)
        .map_err(|e| label(e, &format!("framework without {}", game.target(player))))?;
    Ok(with_all - reduced)
}

fn label(err: AttributionError, what: &str) -> AttributionError {
    match err {
        AttributionError::NonConvergence { source, .. } => AttributionError::NonConvergence {
            context: what.to_owned(),
            source,
        },
        other => other,
    }
}
