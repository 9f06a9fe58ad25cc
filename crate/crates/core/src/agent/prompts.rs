use super::{AgentSpec, Role};
use crate::lang::api_reference;

/// Shared opening line of every agent's system prompt.
pub const TEAM_PREAMBLE: &str = "You are a member of a team of AIs controlling a guide dog robot \
to assist a visually impaired user safely navigate the world.";

const CODER_MANDATE: &str = "\
Role: coder. Interpret the user's instruction or statement and write a program for the robot \
in the robot command language described below. Combine the builtins with whatever logic and \
calculations the task needs. If a plan is present in the conversation, use it as the scaffold \
for your program. If a reviewer gives feedback, reply with a complete revised program. \
Always answer with exactly one fenced ```robo block containing the whole program.";

const REVIEWER_MANDATE: &str = "\
Role: reviewer. Read the coder's latest program and give the coder feedback on how to improve it \
on three grounds: correct coding, effective task completion and safe execution. \
Check that every builtin exists and is called with the right arguments, that the program does \
what the user needs, and that the robot never endangers the user or bystanders. \
When you are satisfied that the program can be executed, end your message with the single word \
APPROVE. Otherwise list the required changes and do not use that word.";

const PLANNER_MANDATE: &str = "\
Role: planner. Interpret the user's request in light of the visible objects and write a short \
numbered list of natural-language steps that the coder will use as a scaffold for its program. \
Mention which objects to use and any conditions to check. Do not write code.";

const MANAGER_MANDATE: &str = "\
Role: chat manager. After every message, promote the next speaker. Send the user's request to \
the first agent of the team. Pass the coder's program to the reviewer. When the reviewer \
approves, pass the program on for execution; otherwise return the conversation to the coder \
with the reviewer's feedback.";

/// The shipped agent for `role`: team preamble, role mandate, and either the
/// language reference (coder, reviewer) or nothing further.
pub fn build_agent(role: Role) -> AgentSpec {
    let mut prompt = String::from(TEAM_PREAMBLE);
    prompt.push_str("\n\n");
    match role {
        Role::Coder => {
            prompt.push_str(CODER_MANDATE);
            prompt.push_str("\n\n");
            prompt.push_str(&api_reference());
        }
        Role::Reviewer => {
            prompt.push_str(REVIEWER_MANDATE);
            prompt.push_str("\n\n");
            prompt.push_str(&api_reference());
        }
        Role::Planner => prompt.push_str(PLANNER_MANDATE),
        Role::Manager => prompt.push_str(MANAGER_MANDATE),
    }
    AgentSpec { name: role.as_str().to_owned(), role, system_prompt: prompt }
}
