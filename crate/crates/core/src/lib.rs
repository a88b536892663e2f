pub mod executor;
pub mod harness;
pub mod planner;
pub mod reasoner;
pub mod recovery;
pub mod scene;
pub mod search;
pub mod subgoal;
pub mod task;
pub mod vocab;
pub mod world;
