"""Extensible conversational information seeking engine."""

from .model import (
    ActorRole,
    AudioPayload,
    Conversation,
    ConversationMode,
    ImagePayload,
    Message,
    OptionItem,
    OptionsPayload,
    SelectionPayload,
    TextPayload,
    Verdict,
    decode_message,
    encode_message,
    validate_message,
)
from .dispatch import ActionOutput, DispatchConfig, Dispatcher, select_output
from .store import InteractionRecord, InteractionStore, Leg

__all__ = [
    "ActionOutput",
    "ActorRole",
    "AudioPayload",
    "Conversation",
    "ConversationMode",
    "DispatchConfig",
    "Dispatcher",
    "ImagePayload",
    "InteractionRecord",
    "InteractionStore",
    "Leg",
    "Message",
    "OptionItem",
    "OptionsPayload",
    "SelectionPayload",
    "TextPayload",
    "Verdict",
    "decode_message",
    "encode_message",
    "select_output",
    "validate_message",
]
