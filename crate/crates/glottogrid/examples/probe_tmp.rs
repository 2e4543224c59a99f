use glottogrid::dynamics::run;
use glottogrid::experiments::{dim3_config, otype_config, standard_config};
use glottogrid::grid::build_topology;
use glottogrid::snapshot::write_snapshot;
use std::path::Path;

fn main() {
    let topo = build_topology(20, 20).unwrap();
    std::fs::create_dir_all("/tmp/probe").unwrap();
    for seed in [1u64, 3, 7] {
        let traj = run(&standard_config(seed)).unwrap();
        write_snapshot(
            traj.last(),
            &topo,
            Path::new(&format!("/tmp/probe/std_{seed}.csv")),
        )
        .unwrap();
    }
    for seed in [1u64, 2] {
        let traj = run(&dim3_config(seed)).unwrap();
        write_snapshot(
            traj.last(),
            &topo,
            Path::new(&format!("/tmp/probe/dim3_{seed}.csv")),
        )
        .unwrap();
    }
    let traj = run(&otype_config(7)).unwrap();
    write_snapshot(traj.last(), &topo, Path::new("/tmp/probe/otype_7.csv")).unwrap();
    println!("done");
}
