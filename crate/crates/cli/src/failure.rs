//! Error classification behind the exit-code contract: 2 for bad input or
//! usage, 1 for internal faults.

use std::fmt::Display;

#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Internal(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Internal(e) => e,
        }
    }

    pub fn input(msg: impl Display) -> Self {
        Failure::Input(anyhow::anyhow!("{msg}"))
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub trait Classify<T> {
    fn input(self, context: impl Display) -> CmdResult<T>;
    fn internal(self, context: impl Display) -> CmdResult<T>;
}

impl<T, E> Classify<T> for Result<T, E>
where
    E: std::error::Error + Send + Sync + 'static,
{
    fn input(self, context: impl Display) -> CmdResult<T> {
        self.map_err(|e| Failure::Input(anyhow::Error::new(e).context(context.to_string())))
    }

    fn internal(self, context: impl Display) -> CmdResult<T> {
        self.map_err(|e| Failure::Internal(anyhow::Error::new(e).context(context.to_string())))
    }
}
