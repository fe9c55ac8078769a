//! Exit-code taxonomy: 1 for malformed invocations, 2 for identity checks
//! that ran and failed, 3 for well-formed requests the model rejects.

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    VerifyFailed,
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::VerifyFailed => 2,
            CliError::Input(_) => 3,
        }
    }
}

impl From<quditphase::Error> for CliError {
    fn from(e: quditphase::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
