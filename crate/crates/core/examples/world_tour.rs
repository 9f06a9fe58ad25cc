//! Drive the simulated robot by hand in the trial-6 room: walk, speak,
//! nudge a person, then print the event trace as JSON lines.
//!
//! ```text
//! cargo run --example world_tour
//! ```

use robobench::world::{spawn_world, Label, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut world = spawn_world(6)?;
    print!("{}", world.digest());

    let person = world.nearest(Label::Person).ok_or("no person in view")?;
    world.say("Hello, I am going to get someone's attention")?;
    let walk = world.walk_to(Point::new(1.0, 0.0))?;
    println!("walk ok={} took {:.2} s", walk.ok, walk.elapsed);
    let nudge = world.nudge(person.id)?;
    println!("nudge ok={} took {:.2} s, robot now at {}", nudge.ok, nudge.elapsed, world.robot().position);
    let wait = world.wait_for_user("Press when ready");
    println!("headless wait ok={} after {:.1} s", wait.ok, wait.elapsed);

    println!("\nclock {:.3} s, trace:", world.sim_clock());
    world.export_trace(std::io::stdout())?;
    Ok(())
}
