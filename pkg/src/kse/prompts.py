"""Prompt rendering for answer generation and answer scoring.

The template is a fixed artifact convention; downstream token counts and
log-probability deltas assume it is rendered bit-exactly.
"""

ANSWER_PROMPT_WITH_CONTEXT = (
    "Refer to the passage below and answer the question.\n"
    "Passage: {context}\n"
    "Question: {question}\n"
    "Answer:"
)

ANSWER_PROMPT_NO_CONTEXT = (
    "Refer to the passage below and answer the question.\n"
    "Question: {question}\n"
    "Answer:"
)


def answer_prompt(question: str, context: str | None = None) -> str:
    """Render the answer prompt; without context the Passage line is omitted."""
    if context is None or context == "":
        return ANSWER_PROMPT_NO_CONTEXT.format(question=question)
    return ANSWER_PROMPT_WITH_CONTEXT.format(context=context, question=question)
