use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("position {position} out of range for {magnitude_bits} magnitude bits")]
    Range { position: u64, magnitude_bits: u32 },

    #[error("cell {cell} out of range for a register of width {width}")]
    CellRange { cell: usize, width: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error("malformed register pattern {0:?}")]
    Pattern(String),

    #[error("register not fully determined: cell {0} is free")]
    Readout(usize),

    #[error("oracle contract violated: {0}")]
    Contract(String),

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
