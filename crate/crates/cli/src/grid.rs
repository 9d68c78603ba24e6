//! Side-length grids given as `start:stop:factor` or as a comma list.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid(Vec<u64>);

impl Grid {
    pub fn geometric(start: u64, stop: u64, factor: u64) -> Result<Self, String> {
        if start == 0 {
            return Err("grid start must be at least 1".into());
        }
        if factor < 2 {
            return Err("grid factor must be at least 2".into());
        }
        if stop < start {
            return Err(format!("grid stop {stop} is below start {start}"));
        }
        let points =
            std::iter::successors(Some(start), |&n| n.checked_mul(factor)).take_while(|&n| n <= stop).collect();
        Ok(Grid(points))
    }

    pub fn points(&self) -> &[u64] {
        &self.0
    }

    pub fn max(&self) -> u64 {
        self.0.last().copied().unwrap_or(0)
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let int = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad grid value `{}`: {e}", t.trim()));
        if s.contains(',') {
            let points = s.split(',').map(int).collect::<Result<Vec<_>, _>>()?;
            if points.windows(2).any(|w| w[0] >= w[1]) || points[0] == 0 {
                return Err("grid list must be positive and strictly increasing".into());
            }
            return Ok(Grid(points));
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [start, stop, factor] => Grid::geometric(int(start)?, int(stop)?, int(factor)?),
            [single] => Grid::geometric(int(single)?, int(single)?, 2),
            _ => Err(format!("expected start:stop:factor, got `{s}`")),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.0.iter().map(u64::to_string).collect();
        f.write_str(&list.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_forms() {
        assert_eq!("4:64:2".parse::<Grid>().unwrap().points(), &[4, 8, 16, 32, 64]);
        assert_eq!("100:100000000:10".parse::<Grid>().unwrap().points().len(), 7);
        assert_eq!("10:99:3".parse::<Grid>().unwrap().points(), &[10, 30, 90]);
        assert_eq!("7".parse::<Grid>().unwrap().points(), &[7]);
        assert_eq!("4, 16,64".parse::<Grid>().unwrap().points(), &[4, 16, 64]);
    }

    #[test]
    fn rejects_bad_grids() {
        for bad in ["0:8:2", "8:4:2", "4:8:1", "4:8", "a:8:2", "4,4", "0,3", ""] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        let g: Grid = "3:3000:10".parse().unwrap();
        assert_eq!(g.to_string().parse::<Grid>().unwrap(), g);
    }
}
