"""
Test code generator: reports what it was asked to generate.

The parameter steers failure modes:
    error   -> response carries an error
    escape  -> emits a file outside the output directory
    crash   -> exits non-zero without a response
    warn    -> adds one warning diagnostic
"""

import sys

from Bebop.COMPILER.protocol import (
    CodeGeneratorResponse,
    Diagnostic,
    GeneratedFile,
    Severity,
    decode_request,
    encode_response,
)


def main() -> int:
    request = decode_request(sys.stdin.buffer.read())
    parameter = request.parameter or ""
    if parameter == "crash":
        sys.stderr.write("echo plugin crashed on purpose\n")
        return 3

    lines = [
        f"parameter: {parameter}",
        f"files: {','.join(request.files_to_generate)}",
        f"schemas: {','.join(schema.name for schema in request.schemas)}",
        f"definitions: {','.join(d.fqn for schema in request.schemas for d in schema.walk())}",
        f"compiler: {request.compiler_version}",
    ]
    response = CodeGeneratorResponse(files=[GeneratedFile("echo.txt", "\n".join(lines) + "\n")])
    if parameter == "error":
        response = CodeGeneratorResponse(error="asked to fail")
    elif parameter == "escape":
        response.files.append(GeneratedFile("../escaped.txt", "nope"))
    elif parameter == "warn":
        response.diagnostics.append(Diagnostic(Severity.WARNING, "just so you know"))

    sys.stdout.buffer.write(encode_response(response))
    sys.stdout.buffer.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
