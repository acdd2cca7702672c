const path = require('path');
const fs = require('fs');

function avatar(res, username) {
  const safe = path.basename(username);
  res.sendFile(path.join('/srv/avatars', safe + '.png'));
}

module.exports = { avatar };

// expect: ApiParam res 4 avatar None -
// expect: ApiParam username 4 avatar None -
