use thiserror::Error;

use crate::game::Player;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix game at state {state}: {source}")]
    AtState {
        state: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("linear system is singular")]
    Singular,

    #[error(
        "potential system for the {player} strategy is singular; the game is not ergodic \
         or the strategy profile is not unichain"
    )]
    NotErgodic { player: Player },

    #[error("strategy does not match the game: {0}")]
    Dimension(String),

    #[error("malformed game file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_state(state: usize, source: Error) -> Self {
        Error::AtState {
            state,
            source: Box::new(source),
        }
    }
}
