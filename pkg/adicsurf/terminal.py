"""Typed, timestamped console log shared by the library and the CLI."""

import queue
import sys
import threading
from datetime import datetime
from typing import List, Optional, TextIO

_MARKERS = {
    "command": "$",
    "error": "❌",
    "warning": "⚠️",
    "success": "✅",
    "info": "ℹ️",
}


class TerminalOutput:
    def __init__(self, max_lines: int = 500, echo: bool = False, stream: Optional[TextIO] = None) -> None:
        self.output_queue: "queue.Queue[str]" = queue.Queue()
        self.max_lines = max_lines
        self.command_count = 0
        self.echo = echo
        self.stream = stream

    def add_line(self, text: str, cmd_type: str = "info") -> None:
        timestamp = datetime.now().strftime("%H:%M:%S")
        if cmd_type == "command":
            self.command_count += 1
        marker = _MARKERS.get(cmd_type)
        formatted_text = f"[{timestamp}] {marker} {text}" if marker else f"[{timestamp}] {text}"

        if self.output_queue.qsize() >= self.max_lines:
            try:
                self.output_queue.get_nowait()
            except queue.Empty:
                pass
        self.output_queue.put(formatted_text)
        if self.echo:
            print(formatted_text, file=self.stream or sys.stderr)

    def info(self, text: str) -> None:
        self.add_line(text, "info")

    def warning(self, text: str) -> None:
        self.add_line(text, "warning")

    def error(self, text: str) -> None:
        self.add_line(text, "error")

    def success(self, text: str) -> None:
        self.add_line(text, "success")

    def get_output(self) -> List[str]:
        lines: List[str] = []
        while not self.output_queue.empty() and len(lines) < self.max_lines:
            try:
                lines.append(self.output_queue.get_nowait())
            except queue.Empty:
                break
        return lines[-self.max_lines :]

    def clear(self) -> None:
        while not self.output_queue.empty():
            try:
                self.output_queue.get_nowait()
            except queue.Empty:
                break


_terminal: Optional[TerminalOutput] = None
_lock = threading.Lock()


def ensure_terminal() -> TerminalOutput:
    global _terminal
    with _lock:
        if _terminal is None:
            _terminal = TerminalOutput()
        return _terminal
