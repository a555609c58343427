//! Sentence templates for the deterministic engine.
//!
//! Slots: `{det:role}` where det is one of the/this/our/a/pl (capitalized at
//! sentence start) and role is `t` (target), `s` (carrier or light) or `d`
//! (distractor). Sentences prefixed `S|` appear only when the task has a
//! carrier or light, `N|` only when it has none.

use crate::world::TaskKind;

type Turn = &'static [&'static str];

pub const ROUNDS: [(&[Turn], &[Turn]); 6] = [
    (
        &[
            &[
                "Hey there, I have been thinking about {the:t} we have at home today.",
                "I really want to make good use of {the:t} before the week is over.",
                "Can you remind me what we usually do with {pl:t}?",
            ],
            &[
                "Good morning, I keep coming back to {the:t} that has been sitting around the house lately.",
                "I would like to take proper care of {our:t} this time.",
                "What do you usually suggest for {pl:t}?",
            ],
        ],
        &[
            &[
                "Absolutely, Alice!",
                "{Pl:t} can be handled in a lot of ways, and most of them are quick and simple.",
                "I would be happy to walk you through the options whenever you like.",
            ],
            &[
                "Of course, Alice!",
                "I have helped with {pl:t} many times before, and there is usually a sensible routine for them.",
                "Let me know how much time you want to spend on this.",
            ],
        ],
    ),
    (
        &[
            &[
                "That is exactly what I was hoping to hear from you today!",
                "I would like {the:t} to be ready before our guests arrive this evening.",
                "Do we have everything we need to deal with {the:t}, though?",
            ],
            &[
                "That sounds really helpful, thank you for offering!",
                "I want to be careful with {this:t} because it matters to me.",
                "Is there anything special I should know about {pl:t}?",
            ],
        ],
        &[
            &[
                "Let me think about what we have available at the moment.",
                "As far as I can tell, we have all the basics, so handling {the:t} should not be a problem at all.",
            ],
            &[
                "Nothing too special, to be honest with you.",
                "{Pl:t} are usually easy to manage, and I will make sure nothing gets damaged while we work on this together today.",
            ],
        ],
    ),
    (
        &[
            &[
                "Perfect, that takes a weight off my mind for today.",
                "I want to make sure {the:t} ends up exactly where it belongs.",
                "S|I am also going to need {the:s} for this, so please do not forget about it.",
                "N|Could you keep an eye on the whole process for me as we go along?",
            ],
            &[
                "Great, I knew I could count on you for this.",
                "I have a feeling {the:t} will need a little attention from both of us.",
                "S|Please keep {the:s} close by, because we will be using {the:s} as well.",
                "N|Please stay close and let me know if anything looks wrong.",
            ],
        ],
        &[
            &[
                "Certainly, I will keep track of everything as we go.",
                "S|{The:s} is nearby, so I can use {the:s} whenever the moment comes.",
                "N|I will stay close and follow your lead at every stage.",
                "{The:t} will be in good hands with me, I promise.",
            ],
            &[
                "Understood, I will pay close attention the whole time.",
                "S|I already know where {the:s} is, so that part will be easy.",
                "N|Just tell me when you are ready and I will take it from there.",
                "You can rely on me to look after {the:t} properly.",
            ],
        ],
    ),
    (
        &[
            &[
                "Great, I really appreciate how patient you are with me.",
                "S|Please make sure {the:s} stays available, because I want {the:s} to be part of this.",
                "N|I know I can be a bit picky about how these things are done.",
                "Let's plan everything around {the:t} today.",
            ],
            &[
                "Thank you, that is very reassuring to hear.",
                "S|I also want {the:s} to be used the way we discussed earlier.",
                "N|I have been a little stressed about getting everything right this week.",
                "Everything else can wait until {the:t} is sorted out.",
            ],
        ],
        &[
            &[
                "No problem at all, I am glad to help with whatever you need.",
                "I will handle {the:t} carefully and follow your instructions one step at a time so nothing is missed.",
            ],
            &[
                "It is my pleasure to help, and there is no need to worry about anything.",
                "I will treat {the:t} with care and keep you updated at every step.",
            ],
        ],
    ),
    (
        &[
            &[
                "Wonderful, you always make these chores feel so much easier.",
                "I have been wanting to get {the:t} sorted out for days now.",
                "Do you think we can finish everything this afternoon?",
            ],
            &[
                "You are such a big help around here, honestly.",
                "I keep thinking about {the:t} and how nice it will be to have this done.",
                "How long do you think the whole thing will take?",
            ],
        ],
        &[
            &[
                "Yes, I am confident we can finish this afternoon without any trouble.",
                "Once you give me the go-ahead, I will take care of {the:t} right away and let you know when it is done.",
            ],
            &[
                "It should not take long at all, probably just a few minutes.",
                "As soon as you are ready, I will start with {the:t} and keep everything tidy along the way.",
            ],
        ],
    ),
    (
        &[
            &[
                "That is good to hear, I feel much more relaxed now.",
                "Before we start, I just want to say thanks for being so helpful with {the:t} and everything else around the house.",
            ],
            &[
                "That sounds great, I am glad we talked this through together.",
                "I feel a lot better about {the:t} now that we have a plan for the rest of the day.",
            ],
        ],
        &[
            &[
                "You are very welcome, Alice, it is always a pleasure to help you.",
                "I am ready whenever you are, and {the:t} will be handled exactly the way you described.",
            ],
            &[
                "I am happy to hear that, Alice, and I am ready to begin.",
                "Just say the word and I will get going with {the:t} the way we planned.",
            ],
        ],
    ),
];

/// Appended to the last robot turn; mentions another object once.
pub const DISTRACTOR: &[&str] = &[
    "By the way, I also noticed {a:d} nearby earlier, just so you know.",
    "I should mention that I saw {a:d} close by as well.",
];

/// First sentence of the instruction. None of these may contain an object
/// noun, a pronoun, or a heating, cooling or cleaning word.
pub const OPENERS: &[&str] = &[
    "Great, that sounds easy enough!",
    "Perfect, thank you for explaining all of that!",
    "Alright, I think we are ready now!",
    "Wonderful, that makes a lot of sense!",
];

pub const ACTIVITIES: [(TaskKind, &[&str]); 6] = [
    (TaskKind::HeatPlace, &["heating", "cooking", "warming up"]),
    (TaskKind::CoolPlace, &["chilling", "cooling down"]),
    (TaskKind::CleanPlace, &["cleaning", "washing", "rinsing"]),
    (TaskKind::PickPlace, &["tidying up", "sorting out", "moving"]),
    (TaskKind::StackPlace, &["tidying up", "sorting out", "organizing"]),
    (TaskKind::ExamineInLight, &["checking", "studying"]),
];

/// Noise sentences for person names. `{n}` never opens a sentence.
pub const NOISE_PERSON: &[&str] = &[
    "I know {n} would love to help with that, since they always have something to say about these chores.",
    "I bet {n} would add their own twist with some cheesy jokes while we work.",
    "I can already imagine {n} popping in with a funny comment about all of this.",
    "Honestly, {n} always reminds me to take things slowly and enjoy the process.",
];

/// Noise sentences for brand names.
pub const NOISE_BRAND: &[&str] = &[
    "I saw an advertisement from {n} this morning and it reminded me of this.",
    "Our friends keep recommending {n}, although I have never tried them myself.",
    "I was reading a review about {n} earlier, which was surprisingly entertaining.",
    "Apparently {n} is opening a new place downtown next month.",
];
