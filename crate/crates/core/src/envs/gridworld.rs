//! Gridworld with gold to collect and traps to avoid.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::cmdp::{ActionId, GenerativeModel, Outcome, Transition};
use crate::error::{Error, Result};
use crate::SimRng;

/// Most gold tiles a map may hold; the collected set is a bitmask.
pub const MAX_GOLD: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tile {
    Empty,
    Wall,
    Trap,
    Gold,
    Initial,
}

impl Tile {
    pub fn from_char(c: char) -> Option<Tile> {
        Some(match c {
            '.' => Tile::Empty,
            '#' => Tile::Wall,
            'T' => Tile::Trap,
            'G' => Tile::Gold,
            'B' => Tile::Initial,
            _ => return None,
        })
    }

    pub fn to_char(self) -> char {
        match self {
            Tile::Empty => '.',
            Tile::Wall => '#',
            Tile::Trap => 'T',
            Tile::Gold => 'G',
            Tile::Initial => 'B',
        }
    }
}

/// Rectangular map with walls on the border and one initial tile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    tiles: Vec<Tile>,
    start: usize,
    /// Gold index of each cell.
    gold_id: Vec<Option<u8>>,
    gold: Vec<usize>,
}

impl GridMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn tile(&self, row: usize, col: usize) -> Tile {
        self.tiles[row * self.width + col]
    }

    /// Cell index of the initial tile.
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn gold_count(&self) -> usize {
        self.gold.len()
    }

    /// Cell indices of the gold tiles, in row-major order.
    pub fn gold_cells(&self) -> &[usize] {
        &self.gold
    }

    pub fn trap_count(&self) -> usize {
        self.tiles.iter().filter(|&&t| t == Tile::Trap).count()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity((self.width + 1) * self.height);
        for r in 0..self.height {
            for c in 0..self.width {
                s.push(self.tile(r, c).to_char());
            }
            s.push('\n');
        }
        s
    }

    fn build(width: usize, height: usize, tiles: Vec<Tile>) -> Result<GridMap> {
        let at = |i: usize| (i / width, i % width);
        let starts: Vec<usize> = (0..tiles.len()).filter(|&i| tiles[i] == Tile::Initial).collect();
        let start = match starts.as_slice() {
            [s] => *s,
            [] => return Err(Error::Parse { row: 0, col: 0, message: "map has no initial tile 'B'".into() }),
            [_, second, ..] => {
                let (row, col) = at(*second);
                return Err(Error::Parse { row, col, message: "map has more than one initial tile 'B'".into() });
            }
        };
        for (i, &t) in tiles.iter().enumerate() {
            let (r, c) = at(i);
            if (r == 0 || c == 0 || r == height - 1 || c == width - 1) && t != Tile::Wall {
                return Err(Error::Parse { row: r, col: c, message: "border tiles must be walls".into() });
            }
        }
        let gold: Vec<usize> = (0..tiles.len()).filter(|&i| tiles[i] == Tile::Gold).collect();
        if gold.len() > MAX_GOLD {
            return Err(Error::Parse { row: 0, col: 0, message: format!("more than {MAX_GOLD} gold tiles") });
        }
        let mut gold_id = vec![None; tiles.len()];
        for (k, &g) in gold.iter().enumerate() {
            gold_id[g] = Some(k as u8);
        }
        let map = GridMap { width, height, tiles, start, gold_id, gold };
        let reach = map.reachable();
        if let Some(&g) = map.gold.iter().find(|&&g| !reach[g]) {
            let (row, col) = at(g);
            return Err(Error::Parse { row, col, message: "gold is unreachable from the initial tile".into() });
        }
        Ok(map)
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.tiles.len()];
        let mut queue = VecDeque::from([self.start]);
        seen[self.start] = true;
        while let Some(i) = queue.pop_front() {
            for d in Direction::ALL {
                let j = self.neighbor(i, d);
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen
    }

    /// Cell reached by one move from `cell`; walls leave the agent in place.
    pub fn neighbor(&self, cell: usize, d: Direction) -> usize {
        let (r, c) = (cell / self.width, cell % self.width);
        let (nr, nc) = match d {
            Direction::Left => (r, c.wrapping_sub(1)),
            Direction::Right => (r, c + 1),
            Direction::Up => (r.wrapping_sub(1), c),
            Direction::Down => (r + 1, c),
        };
        if nr >= self.height || nc >= self.width || self.tile(nr, nc) == Tile::Wall {
            cell
        } else {
            nr * self.width + nc
        }
    }
}

impl fmt::Display for GridMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses a map from rows over `{B, G, #, T, .}`.
pub fn parse_map(text: &str) -> Result<GridMap> {
    let rows: Vec<&str> = text.lines().map(str::trim_end).filter(|l| !l.is_empty()).collect();
    if rows.is_empty() {
        return Err(Error::Parse { row: 0, col: 0, message: "empty map".into() });
    }
    let width = rows[0].chars().count();
    let mut tiles = Vec::with_capacity(width * rows.len());
    for (r, line) in rows.iter().enumerate() {
        let n = line.chars().count();
        if n != width {
            return Err(Error::Parse {
                row: r,
                col: n.min(width),
                message: format!("row has {n} tiles, expected {width}"),
            });
        }
        for (c, ch) in line.chars().enumerate() {
            tiles.push(Tile::from_char(ch).ok_or_else(|| Error::Parse {
                row: r,
                col: c,
                message: format!("unknown tile {ch:?}"),
            })?);
        }
    }
    if width < 3 || rows.len() < 3 {
        return Err(Error::Parse { row: 0, col: 0, message: "map must be at least 3x3".into() });
    }
    GridMap::build(width, rows.len(), tiles)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub width: usize,
    pub height: usize,
    pub gold: usize,
    /// Probability that a free interior cell becomes a trap.
    pub trap_density: f64,
    /// Probability that a free interior cell becomes a wall.
    pub wall_density: f64,
}

const GENERATOR_RETRIES: usize = 1000;

/// Random map with every gold reachable. Gold and traps never share a tile.
pub fn generate_map(params: &GeneratorParams, seed: u64) -> Result<GridMap> {
    let GeneratorParams { width, height, gold, trap_density, wall_density } = *params;
    if width < 3 || height < 3 {
        return Err(Error::Generation("map must be at least 3x3".into()));
    }
    let interior: Vec<usize> = (1..height - 1).flat_map(|r| (1..width - 1).map(move |c| r * width + c)).collect();
    if gold + 1 > interior.len() {
        return Err(Error::Generation(format!(
            "{gold} gold and the initial tile do not fit into {} interior cells",
            interior.len()
        )));
    }
    if gold > MAX_GOLD {
        return Err(Error::Generation(format!("at most {MAX_GOLD} gold supported")));
    }
    if !(0.0..=1.0).contains(&trap_density) || !(0.0..=1.0).contains(&wall_density) || trap_density + wall_density > 1.0
    {
        return Err(Error::Generation("densities must lie in [0, 1] and sum to at most 1".into()));
    }
    let mut rng = SimRng::seed_from_u64(seed);
    for _ in 0..GENERATOR_RETRIES {
        let mut tiles = vec![Tile::Wall; width * height];
        let mut cells = interior.clone();
        cells.shuffle(&mut rng);
        tiles[cells[0]] = Tile::Initial;
        for &c in &cells[1..=gold] {
            tiles[c] = Tile::Gold;
        }
        for &c in &cells[gold + 1..] {
            let u: f64 = rng.gen();
            tiles[c] = if u < trap_density {
                Tile::Trap
            } else if u < trap_density + wall_density {
                Tile::Wall
            } else {
                Tile::Empty
            };
        }
        if let Ok(map) = GridMap::build(width, height, tiles) {
            return Ok(map);
        }
    }
    Err(Error::Generation(format!("no valid map after {GENERATOR_RETRIES} attempts")))
}

/// Parameters, base seed and size of a committed map dataset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetSpec {
    pub name: &'static str,
    pub params: GeneratorParams,
    pub seed: u64,
    pub count: usize,
}

impl DatasetSpec {
    pub fn generate(&self) -> Result<Vec<GridMap>> {
        generate_dataset(&self.params, self.seed, self.count)
    }

    pub fn text(&self) -> Result<String> {
        Ok(format_dataset(&self.params, self.seed, &self.generate()?))
    }
}

pub const GRIDWORLD_SMALL_MINI: DatasetSpec = DatasetSpec {
    name: "GridworldSmall-mini",
    params: GeneratorParams { width: 6, height: 6, gold: 5, trap_density: 0.3, wall_density: 0.1 },
    seed: 1000,
    count: 16,
};

pub const GRIDWORLD_LARGE_MINI: DatasetSpec = DatasetSpec {
    name: "GridworldLarge-mini",
    params: GeneratorParams { width: 25, height: 25, gold: 50, trap_density: 0.1, wall_density: 0.15 },
    seed: 2000,
    count: 8,
};

/// Dataset text: a comment header with the generator parameters, then one
/// map per blank-line separated block.
pub fn format_dataset(params: &GeneratorParams, base_seed: u64, maps: &[GridMap]) -> String {
    let mut s = format!(
        "# width={} height={} gold={} trap_density={} wall_density={} seed={} maps={}\n",
        params.width,
        params.height,
        params.gold,
        params.trap_density,
        params.wall_density,
        base_seed,
        maps.len()
    );
    for m in maps {
        s.push('\n');
        s.push_str(&m.to_text());
    }
    s
}

/// Maps of a dataset file. Comment lines start with `"# "`; map rows never
/// contain spaces.
pub fn parse_dataset(text: &str) -> Result<Vec<GridMap>> {
    let mut maps = Vec::new();
    let mut block = String::new();
    let lines = text.lines().filter(|l| !l.starts_with("# ")).chain(std::iter::once(""));
    for line in lines {
        if line.trim().is_empty() {
            if !block.is_empty() {
                maps.push(parse_map(&block)?);
                block.clear();
            }
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    Ok(maps)
}

/// Generates `count` maps with seeds `base_seed, base_seed + 1, ...`.
pub fn generate_dataset(params: &GeneratorParams, base_seed: u64, count: usize) -> Result<Vec<GridMap>> {
    (0..count).map(|i| generate_map(params, base_seed.wrapping_add(i as u64))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Left,
    Right,
    Up,
    Down,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Left, Direction::Right, Direction::Up, Direction::Down];

    pub fn from_action(a: ActionId) -> Option<Direction> {
        Self::ALL.get(a.0).copied()
    }

    fn perpendicular(self) -> [Direction; 2] {
        match self {
            Direction::Left | Direction::Right => [Direction::Up, Direction::Down],
            Direction::Up | Direction::Down => [Direction::Left, Direction::Right],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrapMode {
    /// A trap costs 1 and kills the agent with probability `p_trap`.
    Avoid,
    /// A trap costs `p_trap` and the agent carries on.
    SoftAvoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridworldConfig {
    pub mode: TrapMode,
    pub p_trap: f64,
    pub p_slide: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridState {
    pub cell: u16,
    /// Bitmask of collected gold.
    pub collected: u64,
    pub alive: bool,
}

#[derive(Clone, Debug)]
pub struct Gridworld {
    map: Arc<GridMap>,
    config: GridworldConfig,
    all_gold: u64,
}

impl Gridworld {
    pub fn new(map: Arc<GridMap>, config: GridworldConfig) -> Result<Self> {
        for (name, p) in [("p_trap", config.p_trap), ("p_slide", config.p_slide)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if map.width * map.height > u16::MAX as usize {
            return Err(Error::Config("map too large".into()));
        }
        let all_gold = if map.gold.len() == 64 { u64::MAX } else { (1u64 << map.gold.len()) - 1 };
        Ok(Self { map, config, all_gold })
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn config(&self) -> &GridworldConfig {
        &self.config
    }

    /// Movement outcomes of `d` before wall clamping.
    pub fn direction_probs(&self, d: Direction) -> Vec<(Direction, f64)> {
        let p = self.config.p_slide;
        let [a, b] = d.perpendicular();
        [(d, 1.0 - p), (a, p / 2.0), (b, p / 2.0)].into_iter().filter(|&(_, q)| q > 0.0).collect()
    }

    /// Arrival at `cell`: (next state without trap death, reward, on trap).
    fn arrive(&self, s: &GridState, cell: usize) -> (GridState, f64, bool) {
        let mut next = GridState { cell: cell as u16, ..*s };
        if cell == s.cell as usize {
            return (next, 0.0, false);
        }
        let mut reward = 0.0;
        if let Some(g) = self.map.gold_id[cell] {
            let bit = 1u64 << g;
            if s.collected & bit == 0 {
                next.collected |= bit;
                reward = 1.0;
            }
        }
        (next, reward, self.map.tiles[cell] == Tile::Trap)
    }

    fn outcomes_from(&self, s: &GridState, cell: usize, prob: f64, out: &mut Vec<Outcome<GridState>>) {
        let (next, reward, trap) = self.arrive(s, cell);
        let mut push = |next: GridState, prob: f64, cost: f64| {
            if prob <= 0.0 {
                return;
            }
            match out.iter_mut().find(|o| o.next == next) {
                Some(o) => o.prob += prob,
                None => out.push(Outcome { next, prob, reward, cost }),
            }
        };
        match (trap, self.config.mode) {
            (false, _) => push(next, prob, 0.0),
            (true, TrapMode::SoftAvoid) => push(next, prob, self.config.p_trap),
            (true, TrapMode::Avoid) => {
                push(GridState { alive: false, ..next }, prob * self.config.p_trap, 1.0);
                push(next, prob * (1.0 - self.config.p_trap), 0.0);
            }
        }
    }

    fn direction(&self, a: ActionId) -> Result<Direction> {
        Direction::from_action(a)
            .ok_or_else(|| Error::InvalidArgument(format!("gridworld action {} is not a direction", a.0)))
    }
}

impl GenerativeModel for Gridworld {
    type State = GridState;

    fn initial_state(&self) -> GridState {
        GridState { cell: self.map.start as u16, collected: 0, alive: true }
    }

    fn action_count(&self, _state: &GridState) -> usize {
        4
    }

    fn sample(&self, s: &GridState, a: ActionId, rng: &mut SimRng) -> Result<Transition<GridState>> {
        let d = self.direction(a)?;
        if !s.alive {
            return Err(Error::InvalidState("agent is dead".into()));
        }
        let u: f64 = rng.gen();
        let [pa, pb] = d.perpendicular();
        let half = self.config.p_slide / 2.0;
        let moved = if u < half {
            pa
        } else if u < 2.0 * half {
            pb
        } else {
            d
        };
        let cell = self.map.neighbor(s.cell as usize, moved);
        let (next, reward, trap) = self.arrive(s, cell);
        if !trap {
            return Ok(Transition { next, reward, cost: 0.0 });
        }
        Ok(match self.config.mode {
            TrapMode::SoftAvoid => Transition { next, reward, cost: self.config.p_trap },
            TrapMode::Avoid => {
                if rng.gen::<f64>() < self.config.p_trap {
                    Transition { next: GridState { alive: false, ..next }, reward, cost: 1.0 }
                } else {
                    Transition { next, reward, cost: 0.0 }
                }
            }
        })
    }

    /// Dead agents and agents holding all gold have nothing left to do.
    fn is_terminal(&self, s: &GridState) -> bool {
        !s.alive || s.collected == self.all_gold
    }

    fn exact_dynamics(&self, s: &GridState, a: ActionId) -> Option<Vec<Outcome<GridState>>> {
        let d = self.direction(a).ok()?;
        let mut out = Vec::new();
        for (dir, p) in self.direction_probs(d) {
            self.outcomes_from(s, self.map.neighbor(s.cell as usize, dir), p, &mut out);
        }
        Some(out)
    }

    fn max_step_cost(&self) -> f64 {
        match self.config.mode {
            TrapMode::Avoid => 1.0,
            TrapMode::SoftAvoid => self.config.p_trap,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn world(text: &str, mode: TrapMode, p_trap: f64, p_slide: f64) -> Gridworld {
        Gridworld::new(Arc::new(parse_map(text).unwrap()), GridworldConfig { mode, p_trap, p_slide }).unwrap()
    }

    #[test]
    fn parses_examples() {
        let m = parse_map("###\n#B#\n###").unwrap();
        assert_eq!((m.width(), m.height(), m.gold_count()), (3, 3, 0));
        let m = parse_map("#####\n#B.G#\n#####").unwrap();
        assert_eq!(m.gold_cells(), &[8]);
        assert_eq!(m.tile(1, 3), Tile::Gold);
    }

    #[test]
    fn parse_errors_name_locations() {
        match parse_map("###\n#BX\n###") {
            Err(Error::Parse { row: 1, col: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_map("###\n#B\n###"), Err(Error::Parse { row: 1, .. })));
        assert!(matches!(parse_map("####\n#BB#\n####"), Err(Error::Parse { row: 1, col: 2, .. })));
        assert!(matches!(parse_map("###\n#.#\n###"), Err(Error::Parse { .. })));
        assert!(matches!(parse_map("######\n#B#.G#\n######"), Err(Error::Parse { row: 1, col: 4, .. })));
    }

    #[test]
    fn generator_is_deterministic_and_round_trips() {
        let p = GeneratorParams { width: 6, height: 6, gold: 5, trap_density: 0.2, wall_density: 0.1 };
        let a = generate_map(&p, 7).unwrap();
        assert_eq!(a, generate_map(&p, 7).unwrap());
        assert_eq!(parse_map(&a.to_text()).unwrap(), a);
        assert_eq!(a.gold_count(), 5);
        let p = GeneratorParams { gold: 16, ..p };
        assert!(matches!(generate_map(&p, 7), Err(Error::Generation(_))));
    }

    #[test]
    fn dataset_round_trip() {
        let p = GeneratorParams { width: 6, height: 6, gold: 3, trap_density: 0.2, wall_density: 0.1 };
        let maps = generate_dataset(&p, 1, 4).unwrap();
        let text = format_dataset(&p, 1, &maps);
        assert_eq!(parse_dataset(&text).unwrap(), maps);
    }

    #[test]
    fn deterministic_move_right() {
        let w = world("######\n#B..G#\n######", TrapMode::Avoid, 0.5, 0.0);
        let s = w.initial_state();
        let tr = w.sample(&s, ActionId(1), &mut SimRng::seed_from_u64(0)).unwrap();
        assert_eq!((tr.next.cell, tr.reward, tr.cost), (s.cell + 1, 0.0, 0.0));
    }

    #[test]
    fn slide_probabilities() {
        let w = world("#####\n#...#\n#.B.#\n#...#\n#####", TrapMode::Avoid, 0.5, 0.2);
        let probs = w.direction_probs(Direction::Right);
        assert_eq!(probs, vec![(Direction::Right, 0.8), (Direction::Up, 0.1), (Direction::Down, 0.1)]);
        let out = w.exact_dynamics(&w.initial_state(), ActionId(1)).unwrap();
        assert_eq!(out.len(), 3);
        assert!((out.iter().map(|o| o.prob).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn soft_trap_costs_p_trap() {
        let w = world("#####\n#BTG#\n#####", TrapMode::SoftAvoid, 0.2, 0.0);
        let tr = w.sample(&w.initial_state(), ActionId(1), &mut SimRng::seed_from_u64(0)).unwrap();
        assert_eq!((tr.reward, tr.cost, tr.next.alive), (0.0, 0.2, true));
        assert!(!w.is_terminal(&tr.next));
    }

    #[test]
    fn avoid_trap_outcomes() {
        let w = world("#####\n#BTG#\n#####", TrapMode::Avoid, 0.3, 0.0);
        let out = w.exact_dynamics(&w.initial_state(), ActionId(1)).unwrap();
        let dead = out.iter().find(|o| !o.next.alive).unwrap();
        assert!((dead.prob - 0.3).abs() < 1e-12 && dead.cost == 1.0);
        assert!(w.is_terminal(&dead.next));
    }

    #[test]
    fn gold_pays_once_and_bumping_walls_is_free() {
        let w = world("####\n#BG#\n####", TrapMode::Avoid, 0.5, 0.0);
        let mut rng = SimRng::seed_from_u64(0);
        let s = w.initial_state();
        let tr = w.sample(&s, ActionId(1), &mut rng).unwrap();
        assert_eq!(tr.reward, 1.0);
        assert!(w.is_terminal(&tr.next));
        let back = w.sample(&GridState { collected: 1, ..s }, ActionId(1), &mut rng).unwrap();
        assert_eq!(back.reward, 0.0);
        let bump = w.sample(&s, ActionId(0), &mut rng).unwrap();
        assert_eq!((bump.next, bump.reward, bump.cost), (s, 0.0, 0.0));
        assert!(w.sample(&s, ActionId(4), &mut rng).is_err());
    }
}
