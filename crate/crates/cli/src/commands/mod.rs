pub mod lap;
pub mod probe;
pub mod region;
pub mod solve;
pub mod verify;

use maxwell_lap::lap::source_samples;
use maxwell_lap::sources::{random_band_limited, random_solenoidal};
use maxwell_lap::{Field64, LapOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{JobConfig, SourceSpec};
use crate::{fieldfile, CliError};

/// Currents sampled on the job grid.
pub fn source_field(job: &JobConfig) -> Result<Field64, CliError> {
    let ncomp = job.material.components();
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    let field = match &job.source {
        SourceSpec::Solenoidal { bandwidth } => random_solenoidal(&job.grid, ncomp, *bandwidth, &mut rng),
        SourceSpec::Random { bandwidth } => random_band_limited(&job.grid, ncomp, *bandwidth, &mut rng),
        SourceSpec::File(path) => {
            let f = fieldfile::read(path)?;
            if f.grid() != &job.grid || f.ncomp() != ncomp {
                return Err(CliError::Usage(format!(
                    "{}: grid {:?} with {} components does not match the job grid {:?} with {ncomp}",
                    path.display(),
                    f.grid().n(),
                    f.ncomp(),
                    job.grid.n()
                )));
            }
            f
        }
        SourceSpec::Packet => source_samples(&job.packet, &job.grid, &LapOptions::default()),
    };
    Ok(field)
}
