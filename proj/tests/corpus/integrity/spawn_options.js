const { spawn } = require('child_process');

function build(opts) {
  const child = spawn(opts.compiler, ['-o', opts.output]);
  if (opts.verbose) console.log('building');
  return child;
}

module.exports = { build };

// expect: ApiParam opts 3 build CmdInj 4
// expect: ParamProperty compiler 4 build CmdInj 4
// expect: ParamProperty output 4 build CmdInj 4
// expect: ParamProperty verbose 5 build None -
