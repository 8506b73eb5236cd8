// tfkit command line tool: decode, encode and validate single-string
// values against a datatype from a YAML specification, one value per line
// or whole-input, for use in shell pipelines.
//
// Exit codes: 0 success; 1 a value or text was rejected; 2 the spec failed
// to load or compile; 3 usage error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <tfkit/tfkit.hpp>

namespace {

enum class Mode { Decode, Encode, Validate, CheckSpec };

struct Options {
  std::string spec_path;
  std::string datatype;
  std::string input_path;  // empty: standard input
  bool lines = false;
  bool pretty = false;
};

std::string read_all(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int fail_line(std::size_t lineno, const std::exception& e) {
  std::cerr << "tfkit: line " << lineno << ": " << e.what() << "\n";
  return 1;
}

template <class Fn>
int for_each_input(const Options& opt, Fn per_item) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (!opt.input_path.empty()) {
    file.open(opt.input_path, std::ios::binary);
    if (!file) {
      std::cerr << "tfkit: cannot open input file '" << opt.input_path << "'\n";
      return 3;
    }
    in = &file;
  }
  if (opt.lines) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(*in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (int rc = per_item(line, lineno); rc != 0) return rc;
    }
    return 0;
  }
  std::string whole = read_all(*in);
  if (!whole.empty() && whole.back() == '\n') whole.pop_back();
  if (!whole.empty() && whole.back() == '\r') whole.pop_back();
  return per_item(whole, 1);
}

int run_decode(const Options& opt, const tfkit::CompiledDef& def, bool quiet) {
  return for_each_input(opt, [&](const std::string& text, std::size_t lineno) {
    try {
      tfkit::Value v = tfkit::decode(def, text);
      if (!quiet) std::cout << tfkit::value_to_json_text(v, opt.pretty) << "\n";
      return 0;
    } catch (const tfkit::DecodeError& e) {
      return fail_line(lineno, e);
    }
  });
}

int run_encode(const Options& opt, const tfkit::CompiledDef& def) {
  return for_each_input(opt, [&](const std::string& text, std::size_t lineno) {
    try {
      tfkit::Value v = tfkit::json_text_to_value(text);
      std::cout << tfkit::encode(def, v) << "\n";
      return 0;
    } catch (const tfkit::JsonError& e) {
      return fail_line(lineno, e);
    } catch (const tfkit::EncodeError& e) {
      return fail_line(lineno, e);
    }
  });
}

int run_check_spec(const std::string& path) {
  try {
    tfkit::Spec spec = tfkit::load_spec_file(path);
    for (const auto& [name, _] : spec.datatypes) tfkit::compile(spec, name);
    std::cout << "spec OK: " << spec.datatypes.size() << " datatypes\n";
    return 0;
  } catch (const tfkit::SpecError& e) {
    std::cerr << "tfkit: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"text-format datatype decoder/encoder"};
  app.require_subcommand(1);

  Options opt;
  Mode mode = Mode::Decode;

  auto add_common = [&](CLI::App* cmd, bool needs_dt) {
    cmd->add_option("--spec", opt.spec_path, "specification file (YAML)")
        ->required()
        ->check(CLI::ExistingFile);
    if (needs_dt)
      cmd->add_option("--dt", opt.datatype, "datatype name within the spec")->required();
    cmd->add_option("--input", opt.input_path, "input file (default: standard input)");
    cmd->add_flag("--lines", opt.lines, "process the input one value per line");
  };

  CLI::App* decode = app.add_subcommand("decode", "text representation -> JSON value");
  add_common(decode, true);
  decode->add_flag("--pretty", opt.pretty, "indent the JSON output");
  decode->callback([&] { mode = Mode::Decode; });

  CLI::App* encode = app.add_subcommand("encode", "JSON value -> text representation");
  add_common(encode, true);
  encode->callback([&] { mode = Mode::Encode; });

  CLI::App* validate =
      app.add_subcommand("validate", "check the input; only the exit code reports the result");
  add_common(validate, true);
  validate->callback([&] { mode = Mode::Validate; });

  CLI::App* check = app.add_subcommand("check-spec", "load and compile every datatype");
  check->add_option("--spec", opt.spec_path, "specification file (YAML)")
      ->required()
      ->check(CLI::ExistingFile);
  check->callback([&] { mode = Mode::CheckSpec; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  if (mode == Mode::CheckSpec) return run_check_spec(opt.spec_path);

  std::optional<tfkit::CompiledDef> def;
  try {
    tfkit::Spec spec = tfkit::load_spec_file(opt.spec_path);
    def = tfkit::compile(spec, opt.datatype);
  } catch (const tfkit::SpecError& e) {
    std::cerr << "tfkit: " << e.what() << "\n";
    return 2;
  }

  switch (mode) {
    case Mode::Decode: return run_decode(opt, *def, false);
    case Mode::Validate: return run_decode(opt, *def, true);
    case Mode::Encode: return run_encode(opt, *def);
    default: return 3;
  }
}
