use super::check_permutation;
use crate::instance::AtspInstance;
use crate::solution::SolveError;

/// Length of the closed tour. One city (or none) costs 0.
pub fn tour_cost(atsp: &AtspInstance, tour: &[usize]) -> Result<f64, SolveError> {
    let n = atsp.cities();
    check_permutation(tour, n)?;
    if n < 2 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (i, &from) in tour.iter().enumerate() {
        total += atsp.weight(from, tour[(i + 1) % n]);
    }
    Ok(total)
}
